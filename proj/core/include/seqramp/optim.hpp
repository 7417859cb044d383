#pragma once

#include <span>

#include "seqramp/tensor.hpp"

namespace seqramp {

// Returns the global gradient 2-norm across all parameters.
double global_grad_norm(std::span<Parameter* const> params);

// SGD update with global-norm clipping: if the gradient norm exceeds
// clip_norm, all gradients are scaled by clip_norm / norm before the update.
// Gradients are zeroed afterwards.
void sgd_step(std::span<Parameter* const> params, double learning_rate, double clip_norm);

} // namespace seqramp
