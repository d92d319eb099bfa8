#include "cmmc/models.hpp"

#include "cmmc/pattern_io.hpp"

#include <sstream>
#include <stdexcept>

namespace cmmc {

void validate(const PoissonParams& p) {
    if (!(p.intensity >= 0.0))
        throw std::invalid_argument("poisson: intensity must be >= 0");
}

void validate(const StraussParams& p) {
    if (!(p.beta > 0.0)) throw std::invalid_argument("strauss: beta must be > 0");
    if (!(p.gamma >= 0.0 && p.gamma <= 1.0))
        throw std::invalid_argument("strauss: gamma must be in [0,1]");
    if (!(p.radius > 0.0)) throw std::invalid_argument("strauss: radius must be > 0");
}

void validate(const LgcpParams& p) {
    if (!(p.sigma2 >= 0.0)) throw std::invalid_argument("lgcp: sigma2 must be >= 0");
    if (!(p.scale > 0.0)) throw std::invalid_argument("lgcp: scale must be > 0");
}

void validate(const NullModel& m) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MixtureModel>) {
                if (p.components.empty())
                    throw std::invalid_argument("mixture: must have at least one component");
                for (const auto& c : p.components) validate(c);
            } else {
                validate(p);
            }
        },
        m.spec);
}

namespace {

std::vector<double> parse_numbers(const std::string& csv, std::size_t expected,
                                  const std::string& what) {
    std::vector<double> out;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad number `" + tok + "` in " + what + " spec");
        }
    }
    if (out.size() != expected)
        throw std::invalid_argument(what + " spec needs " + std::to_string(expected) +
                                    " comma-separated parameters");
    return out;
}

} // namespace

NullModel parse_model(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("model spec must look like `name:params`: " + spec);
    const std::string name = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (name == "poisson") {
        const auto v = parse_numbers(rest, 1, "poisson");
        PoissonParams p{v[0]};
        if (!(p.intensity > 0.0))
            throw std::invalid_argument("poisson: intensity must be > 0");
        return NullModel(p);
    }
    if (name == "strauss") {
        const auto v = parse_numbers(rest, 3, "strauss");
        StraussParams p{v[0], v[1], v[2]};
        validate(p);
        return NullModel(p);
    }
    if (name == "lgcp") {
        const auto v = parse_numbers(rest, 3, "lgcp");
        LgcpParams p{v[0], v[1], v[2]};
        validate(p);
        return NullModel(p);
    }
    throw std::invalid_argument("unknown model family: " + name);
}

std::string model_to_string(const NullModel& model) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PoissonParams>) {
                return "poisson:" + format_double(p.intensity);
            } else if constexpr (std::is_same_v<T, StraussParams>) {
                return "strauss:" + format_double(p.beta) + "," + format_double(p.gamma) + "," +
                       format_double(p.radius);
            } else if constexpr (std::is_same_v<T, LgcpParams>) {
                return "lgcp:" + format_double(p.mu) + "," + format_double(p.sigma2) + "," +
                       format_double(p.scale);
            } else {
                std::string s = "mixture[";
                for (std::size_t i = 0; i < p.components.size(); ++i) {
                    if (i) s += ";";
                    s += model_to_string(p.components[i]);
                }
                return s + "]";
            }
        },
        model.spec);
}

} // namespace cmmc
