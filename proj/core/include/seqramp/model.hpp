#pragma once

#include <memory>
#include <vector>

#include "seqramp/rng.hpp"
#include "seqramp/tensor.hpp"

namespace seqramp {

struct ModelConfig {
    int embed_dim = 32;
    int hidden_dim = 64;
    int src_vocab_size = 0;
    int tgt_vocab_size = 0;
};

// Attentional encoder-decoder: bidirectional GRU encoder, GRU decoder with
// single-layer additive attention over the encoder states, and a tanh
// readout feeding the output projection.
class SeqModel {
  public:
    explicit SeqModel(ModelConfig cfg);

    const ModelConfig& config() const { return cfg_; }

    // Uniform init in [-0.08, 0.08], seeded.
    void init_params(Rng& rng);

    std::vector<Parameter*> parameters();
    std::vector<Parameter*> parameters() const;
    std::size_t parameter_count() const;

    struct EncodedInput {
        NodeId states;     // [T, 2H]
        NodeId attn_proj;  // [T, H], encoder states through the attention key map
        NodeId init_state; // [1, H]
        int length = 0;
    };

    struct DecoderState {
        NodeId hidden; // [1, H]
    };

    struct StepResult {
        NodeId log_probs; // [1, Vt], log-softmax row
        DecoderState state;
    };

    EncodedInput encode(Tape& tape, const std::vector<int>& x);
    StepResult decode_step(Tape& tape, const EncodedInput& enc, const DecoderState& state,
                           int prev_token);

    // Teacher-forced scoring: node j is log pi(y_j | y_<j, x) as a [1,1] node.
    std::vector<NodeId> score_sequence_nodes(Tape& tape, const std::vector<int>& x,
                                             const std::vector<int>& y);
    // Same, values only.
    std::vector<double> score_sequence(const std::vector<int>& x, const std::vector<int>& y);

  private:
    struct Gru {
        Parameter *Wz, *Uz, *bz;
        Parameter *Wr, *Ur, *br;
        Parameter *Wc, *Uc, *bc;
    };

    Parameter* make_param(const std::string& name, int rows, int cols);
    Gru make_gru(const std::string& prefix, int input_dim, int hidden_dim);
    NodeId gru_cell(Tape& tape, const Gru& g, NodeId x, NodeId h) const;
    void check_source(const std::vector<int>& x) const;
    void check_target(const std::vector<int>& y) const;

    ModelConfig cfg_;
    std::vector<std::unique_ptr<Parameter>> storage_;

    Parameter* src_emb_;
    Parameter* tgt_emb_;
    Gru enc_fwd_;
    Gru enc_bwd_;
    Gru dec_;
    Parameter *attn_key_, *attn_query_, *attn_v_;
    Parameter *init_w_, *init_b_;
    Parameter *ro_state_, *ro_ctx_, *ro_emb_, *ro_b_;
    Parameter *out_w_, *out_b_;
};

} // namespace seqramp
