#include <benchmark/benchmark.h>

#include "seqramp/decoder.hpp"
#include "seqramp/metrics.hpp"
#include "seqramp/model.hpp"
#include "seqramp/objectives.hpp"
#include "seqramp/rng.hpp"

using namespace seqramp;

namespace {

SeqModel bench_model(int embed, int hidden, int vocab) {
    SeqModel m(ModelConfig{embed, hidden, vocab, vocab});
    Rng rng(42);
    m.init_params(rng);
    return m;
}

void BM_matmul(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(1);
    Tensor a(n, n), b(n, n);
    for (double& v : a.values) v = rng.uniform(-1, 1);
    for (double& v : b.values) v = rng.uniform(-1, 1);
    for (auto _ : state) {
        Tape tape;
        tape.set_recording(false);
        benchmark::DoNotOptimize(tape.matmul(tape.leaf(a), tape.leaf(b)));
    }
}
BENCHMARK(BM_matmul)->Arg(16)->Arg(64)->Arg(128);

void BM_score_sequence_forward(benchmark::State& state) {
    SeqModel m = bench_model(32, 64, 60);
    std::vector<int> x{4, 5, 6, 7, 8, 9};
    std::vector<int> y{10, 11, 12, 13, 14, 2};
    for (auto _ : state) benchmark::DoNotOptimize(m.score_sequence(x, y));
}
BENCHMARK(BM_score_sequence_forward);

void BM_mle_backward(benchmark::State& state) {
    SeqModel m = bench_model(32, 64, 60);
    std::vector<std::pair<std::vector<int>, std::vector<int>>> batch{
        {{4, 5, 6, 7, 8, 9}, {10, 11, 12, 13, 14, 2}}};
    for (auto _ : state) {
        Tape tape;
        NodeId loss = mle_loss(m, tape, batch);
        tape.backward(loss);
        for (Parameter* p : m.parameters()) p->zero_grad();
    }
}
BENCHMARK(BM_mle_backward);

void BM_beam_search(benchmark::State& state) {
    SeqModel m = bench_model(32, 64, 60);
    std::vector<int> x{4, 5, 6, 7, 8, 9};
    const int beam = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(beam_search(m, x, beam, beam, 20));
}
BENCHMARK(BM_beam_search)->Arg(4)->Arg(10)->Arg(16);

void BM_delta1(benchmark::State& state) {
    Rng rng(7);
    std::vector<int> doc(400), y(20);
    for (int& t : doc) t = rng.uniform_int(0, 99);
    for (int& t : y) t = rng.uniform_int(0, 99);
    NGramIndex idx(0, doc, 4);
    for (auto _ : state) benchmark::DoNotOptimize(delta1(y, idx, 20, 1.0));
}
BENCHMARK(BM_delta1);

void BM_bleu_plus1(benchmark::State& state) {
    Rng rng(9);
    std::vector<int> y(20), ref(22);
    for (int& t : y) t = rng.uniform_int(0, 50);
    for (int& t : ref) t = rng.uniform_int(0, 50);
    for (auto _ : state) benchmark::DoNotOptimize(bleu_plus1(y, ref));
}
BENCHMARK(BM_bleu_plus1);

} // namespace

BENCHMARK_MAIN();
