#pragma once

#include <string>
#include <vector>

#include "seqramp/trainer.hpp"

namespace seqramp {

struct BucketRow {
    std::string label;
    int count = 0;
    double metric = 0.0;
    double length_ratio = 0.0; // hypothesis/reference length ratio
};

// Source-length quartile buckets with the report's metric and the
// hypothesis/reference length ratio per bucket.
std::vector<BucketRow> length_bucket_report(const EvalReport& report, int buckets = 4);

// Buckets by the per-instance group id; rows without a group are skipped.
std::vector<BucketRow> group_bucket_report(const EvalReport& report);

void save_bucket_report(const std::string& path, const std::vector<BucketRow>& rows);

} // namespace seqramp
