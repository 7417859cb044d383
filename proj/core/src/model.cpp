#include "seqramp/model.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

#include "seqramp/vocab.hpp"

namespace seqramp {

SeqModel::SeqModel(ModelConfig cfg) : cfg_(cfg) {
    if (cfg_.embed_dim <= 0 || cfg_.hidden_dim <= 0)
        throw std::invalid_argument("SeqModel: dimensions must be positive");
    if (cfg_.src_vocab_size < 4 || cfg_.tgt_vocab_size < 4)
        throw std::invalid_argument("SeqModel: vocab sizes must cover the reserved ids");
    const int E = cfg_.embed_dim;
    const int H = cfg_.hidden_dim;

    src_emb_ = make_param("src_emb", cfg_.src_vocab_size, E);
    tgt_emb_ = make_param("tgt_emb", cfg_.tgt_vocab_size, E);
    enc_fwd_ = make_gru("enc_fwd", E, H);
    enc_bwd_ = make_gru("enc_bwd", E, H);
    dec_ = make_gru("dec", E + 2 * H, H);
    attn_key_ = make_param("attn.key", 2 * H, H);
    attn_query_ = make_param("attn.query", H, H);
    attn_v_ = make_param("attn.v", H, 1);
    init_w_ = make_param("init.w", 2 * H, H);
    init_b_ = make_param("init.b", 1, H);
    ro_state_ = make_param("readout.state", H, H);
    ro_ctx_ = make_param("readout.ctx", 2 * H, H);
    ro_emb_ = make_param("readout.emb", E, H);
    ro_b_ = make_param("readout.b", 1, H);
    out_w_ = make_param("out.w", H, cfg_.tgt_vocab_size);
    out_b_ = make_param("out.b", 1, cfg_.tgt_vocab_size);
}

Parameter* SeqModel::make_param(const std::string& name, int rows, int cols) {
    storage_.push_back(std::make_unique<Parameter>(name, Tensor(rows, cols)));
    return storage_.back().get();
}

SeqModel::Gru SeqModel::make_gru(const std::string& prefix, int input_dim, int hidden_dim) {
    Gru g;
    g.Wz = make_param(prefix + ".Wz", input_dim, hidden_dim);
    g.Uz = make_param(prefix + ".Uz", hidden_dim, hidden_dim);
    g.bz = make_param(prefix + ".bz", 1, hidden_dim);
    g.Wr = make_param(prefix + ".Wr", input_dim, hidden_dim);
    g.Ur = make_param(prefix + ".Ur", hidden_dim, hidden_dim);
    g.br = make_param(prefix + ".br", 1, hidden_dim);
    g.Wc = make_param(prefix + ".Wc", input_dim, hidden_dim);
    g.Uc = make_param(prefix + ".Uc", hidden_dim, hidden_dim);
    g.bc = make_param(prefix + ".bc", 1, hidden_dim);
    return g;
}

void SeqModel::init_params(Rng& rng) {
    for (auto& p : storage_)
        for (double& v : p->value.values) v = rng.uniform(-0.08, 0.08);
}

std::vector<Parameter*> SeqModel::parameters() {
    std::vector<Parameter*> out;
    out.reserve(storage_.size());
    for (auto& p : storage_) out.push_back(p.get());
    return out;
}

std::vector<Parameter*> SeqModel::parameters() const {
    std::vector<Parameter*> out;
    out.reserve(storage_.size());
    for (auto& p : storage_) out.push_back(p.get());
    return out;
}

std::size_t SeqModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : storage_) n += p->value.size();
    return n;
}

NodeId SeqModel::gru_cell(Tape& tape, const Gru& g, NodeId x, NodeId h) const {
    NodeId z = tape.sigmoid(tape.add(
        tape.add(tape.matmul(x, tape.param(*g.Wz)), tape.matmul(h, tape.param(*g.Uz))),
        tape.param(*g.bz)));
    NodeId r = tape.sigmoid(tape.add(
        tape.add(tape.matmul(x, tape.param(*g.Wr)), tape.matmul(h, tape.param(*g.Ur))),
        tape.param(*g.br)));
    NodeId c = tape.tanh(tape.add(
        tape.add(tape.matmul(x, tape.param(*g.Wc)), tape.matmul(tape.mul(r, h), tape.param(*g.Uc))),
        tape.param(*g.bc)));
    // h' = h + z * (c - h)
    return tape.add(h, tape.mul(z, tape.sub(c, h)));
}

void SeqModel::check_source(const std::vector<int>& x) const {
    if (x.empty()) throw std::invalid_argument("encode: empty source sequence");
    for (int id : x)
        if (id < 0 || id >= cfg_.src_vocab_size) {
            std::ostringstream os;
            os << "encode: source id " << id << " outside vocab of size " << cfg_.src_vocab_size;
            throw std::invalid_argument(os.str());
        }
}

void SeqModel::check_target(const std::vector<int>& y) const {
    if (y.empty()) throw std::invalid_argument("score: empty target sequence");
    for (int id : y)
        if (id < 0 || id >= cfg_.tgt_vocab_size) {
            std::ostringstream os;
            os << "score: target id " << id << " outside vocab of size " << cfg_.tgt_vocab_size;
            throw std::invalid_argument(os.str());
        }
}

SeqModel::EncodedInput SeqModel::encode(Tape& tape, const std::vector<int>& x) {
    check_source(x);
    const int T = static_cast<int>(x.size());
    const int H = cfg_.hidden_dim;

    NodeId emb = tape.gather_rows(tape.param(*src_emb_), x);

    std::vector<NodeId> token_rows(x.size());
    for (int t = 0; t < T; ++t) token_rows[t] = tape.gather_rows(emb, {t});

    std::vector<NodeId> fwd(x.size()), bwd(x.size());
    NodeId h = tape.leaf(Tensor(1, H));
    for (int t = 0; t < T; ++t) {
        h = gru_cell(tape, enc_fwd_, token_rows[t], h);
        fwd[t] = h;
    }
    NodeId g = tape.leaf(Tensor(1, H));
    for (int t = T - 1; t >= 0; --t) {
        g = gru_cell(tape, enc_bwd_, token_rows[t], g);
        bwd[t] = g;
    }

    std::vector<NodeId> state_rows(x.size());
    for (int t = 0; t < T; ++t) {
        std::array<NodeId, 2> parts{fwd[t], bwd[t]};
        state_rows[t] = tape.concat_cols(parts);
    }
    NodeId states = tape.concat_rows(state_rows);
    NodeId attn_proj = tape.matmul(states, tape.param(*attn_key_));

    NodeId mean = tape.matmul(tape.leaf(Tensor(1, T, 1.0 / T)), states);
    NodeId init = tape.tanh(tape.add(tape.matmul(mean, tape.param(*init_w_)), tape.param(*init_b_)));

    return EncodedInput{states, attn_proj, init, T};
}

SeqModel::StepResult SeqModel::decode_step(Tape& tape, const EncodedInput& enc,
                                           const DecoderState& state, int prev_token) {
    if (prev_token < 0 || prev_token >= cfg_.tgt_vocab_size)
        throw std::invalid_argument("decode_step: previous token outside target vocab");

    NodeId e = tape.gather_rows(tape.param(*tgt_emb_), {prev_token});

    NodeId q = tape.matmul(state.hidden, tape.param(*attn_query_));
    NodeId energies = tape.matmul(tape.tanh(tape.add_row(enc.attn_proj, q)), tape.param(*attn_v_));
    NodeId weights = tape.softmax_rows(tape.transpose(energies)); // [1, T]
    NodeId ctx = tape.matmul(weights, enc.states);                // [1, 2H]

    std::array<NodeId, 2> in_parts{e, ctx};
    NodeId u = tape.concat_cols(in_parts);
    NodeId h = gru_cell(tape, dec_, u, state.hidden);

    NodeId readout = tape.tanh(tape.add(
        tape.add(tape.add(tape.matmul(h, tape.param(*ro_state_)), tape.matmul(ctx, tape.param(*ro_ctx_))),
                 tape.matmul(e, tape.param(*ro_emb_))),
        tape.param(*ro_b_)));
    NodeId logits = tape.add(tape.matmul(readout, tape.param(*out_w_)), tape.param(*out_b_));
    NodeId logp = tape.log_softmax_rows(logits);
    return StepResult{logp, DecoderState{h}};
}

std::vector<NodeId> SeqModel::score_sequence_nodes(Tape& tape, const std::vector<int>& x,
                                                   const std::vector<int>& y) {
    check_target(y);
    EncodedInput enc = encode(tape, x);
    DecoderState state{enc.init_state};
    int prev = Vocab::kBos;
    std::vector<NodeId> out;
    out.reserve(y.size());
    for (int tok : y) {
        StepResult step = decode_step(tape, enc, state, prev);
        out.push_back(tape.pick(step.log_probs, 0, tok));
        state = step.state;
        prev = tok;
    }
    return out;
}

std::vector<double> SeqModel::score_sequence(const std::vector<int>& x, const std::vector<int>& y) {
    Tape tape;
    tape.set_recording(false);
    std::vector<NodeId> nodes = score_sequence_nodes(tape, x, y);
    std::vector<double> out;
    out.reserve(nodes.size());
    for (NodeId n : nodes) out.push_back(tape.scalar_value(n));
    return out;
}

} // namespace seqramp
