#include "seqramp/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace seqramp {

double global_grad_norm(std::span<Parameter* const> params) {
    double sq = 0.0;
    for (const Parameter* p : params)
        for (double g : p->grad.values) sq += g * g;
    return std::sqrt(sq);
}

void sgd_step(std::span<Parameter* const> params, double learning_rate, double clip_norm) {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("sgd_step: learning_rate must be > 0");
    if (!(clip_norm > 0.0)) throw std::invalid_argument("sgd_step: clip_norm must be > 0");
    const double norm = global_grad_norm(params);
    const double scale = norm > clip_norm ? clip_norm / norm : 1.0;
    for (Parameter* p : params) {
        for (std::size_t i = 0; i < p->value.values.size(); ++i)
            p->value.values[i] -= learning_rate * scale * p->grad.values[i];
        p->zero_grad();
    }
}

} // namespace seqramp
