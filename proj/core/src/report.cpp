#include "seqramp/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "seqramp/common.hpp"
#include "seqramp/tasks.hpp"
#include "seqramp/vocab.hpp"

namespace seqramp {

namespace {

BucketRow score_bucket(const std::string& label, const std::vector<const EvalRow*>& rows) {
    BucketRow out;
    out.label = label;
    out.count = static_cast<int>(rows.size());
    if (rows.empty()) return out;

    long hyp_len = 0, ref_len = 0;
    bool parsing = false;
    for (const EvalRow* r : rows) {
        hyp_len += static_cast<long>(split_tokens(r->hyp).size());
        ref_len += static_cast<long>(split_tokens(r->ref).size());
        parsing = parsing || r->correct >= 0;
    }
    out.length_ratio = ref_len > 0 ? static_cast<double>(hyp_len) / static_cast<double>(ref_len) : 0.0;

    if (parsing) {
        std::vector<std::pair<Answer, Answer>> results;
        for (const EvalRow* r : rows)
            results.emplace_back(parse_answer_field(r->answer), parse_answer_field(r->gold));
        out.metric = answer_f1(results).f1;
    } else {
        Vocab v;
        std::vector<std::vector<int>> hyps, refs;
        for (const EvalRow* r : rows) {
            std::vector<int> h, rr;
            for (const std::string& t : split_tokens(r->hyp)) h.push_back(v.add(t));
            for (const std::string& t : split_tokens(r->ref)) rr.push_back(v.add(t));
            hyps.push_back(std::move(h));
            refs.push_back(std::move(rr));
        }
        out.metric = corpus_bleu(hyps, refs);
    }
    return out;
}

} // namespace

std::vector<BucketRow> length_bucket_report(const EvalReport& report, int buckets) {
    if (buckets < 1) throw UsageError("bucket count must be positive");
    if (report.rows.empty()) throw DataError("report has no rows");

    std::vector<int> lengths;
    lengths.reserve(report.rows.size());
    for (const EvalRow& r : report.rows) lengths.push_back(r.source_len);
    std::sort(lengths.begin(), lengths.end());
    const std::size_t n = lengths.size();

    // boundary k is the ceil(k*n/buckets)-th smallest length, giving
    // approximately equal bucket occupancy
    std::vector<int> bounds;
    for (int k = 1; k < buckets; ++k) {
        const std::size_t idx = (static_cast<std::size_t>(k) * n + buckets - 1) /
                                static_cast<std::size_t>(buckets);
        bounds.push_back(lengths[idx - 1]);
    }

    std::vector<std::vector<const EvalRow*>> groups(static_cast<std::size_t>(buckets));
    for (const EvalRow& r : report.rows) {
        int b = 0;
        while (b < buckets - 1 && r.source_len > bounds[static_cast<std::size_t>(b)]) ++b;
        groups[static_cast<std::size_t>(b)].push_back(&r);
    }

    std::vector<BucketRow> out;
    for (int b = 0; b < buckets; ++b) {
        std::string label;
        if (b == 0) label = "len<=" + std::to_string(bounds.empty() ? lengths.back() : bounds[0]);
        else if (b == buckets - 1) label = "len>" + std::to_string(bounds[static_cast<std::size_t>(b - 1)]);
        else
            label = std::to_string(bounds[static_cast<std::size_t>(b - 1)] + 1) + "-" +
                    std::to_string(bounds[static_cast<std::size_t>(b)]);
        out.push_back(score_bucket(label, groups[static_cast<std::size_t>(b)]));
    }
    return out;
}

std::vector<BucketRow> group_bucket_report(const EvalReport& report) {
    std::map<int, std::vector<const EvalRow*>> groups;
    for (const EvalRow& r : report.rows)
        if (r.group >= 0) groups[r.group].push_back(&r);
    if (groups.empty()) throw DataError("report carries no group ids");
    std::vector<BucketRow> out;
    for (const auto& [id, rows] : groups)
        out.push_back(score_bucket("group" + std::to_string(id), rows));
    return out;
}

void save_bucket_report(const std::string& path, const std::vector<BucketRow>& rows) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot write bucket report: " + path);
    os.precision(17);
    os << "bucket\tcount\tmetric\tlength_ratio\n";
    for (const BucketRow& r : rows)
        os << r.label << "\t" << r.count << "\t" << r.metric << "\t" << r.length_ratio << "\n";
}

} // namespace seqramp
