#pragma once

#include <string>
#include <variant>
#include <vector>

namespace cmmc {

/// Homogeneous Poisson process, points per unit area. A zero intensity is
/// the degenerate empty-pattern model produced by fitting an empty pattern;
/// user-specified models must have intensity > 0.
struct PoissonParams {
    double intensity;
    bool degenerate() const { return intensity == 0.0; }
};

/// Strauss process with density proportional to beta^N * gamma^{s(x)}, where
/// s(x) counts point pairs closer than `radius`.
struct StraussParams {
    double beta;
    double gamma;
    double radius;
};

/// Log-Gaussian Cox process: intensity surface exp(mu + Z) for a zero-mean
/// stationary Gaussian field Z with covariance sigma2 * exp(-d / scale).
struct LgcpParams {
    double mu;
    double sigma2;
    double scale;
};

struct NullModel;

/// Equal-weight mixture of null models (used for parametric augmentation).
struct MixtureModel {
    std::vector<NullModel> components;
};

struct NullModel {
    std::variant<PoissonParams, StraussParams, LgcpParams, MixtureModel> spec;

    NullModel(PoissonParams p) : spec(p) {}
    NullModel(StraussParams p) : spec(p) {}
    NullModel(LgcpParams p) : spec(p) {}
    NullModel(MixtureModel p) : spec(std::move(p)) {}

    bool is_mixture() const { return std::holds_alternative<MixtureModel>(spec); }
};

void validate(const PoissonParams& p);
void validate(const StraussParams& p);
void validate(const LgcpParams& p);
void validate(const NullModel& m);

/// Parses `poisson:lambda`, `strauss:beta,gamma,R` or `lgcp:mu,sigma2,scale`.
NullModel parse_model(const std::string& spec);
std::string model_to_string(const NullModel& model);

} // namespace cmmc
