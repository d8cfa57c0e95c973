#include <rig/weights.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <rig/numerics.hpp>

namespace rig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tail_mass(const WeightSpec& s) {
    return s.tail_const * std::pow(s.cutoff, -s.gamma - 1.0);
}

// Expectation of g(X0) for the unscaled base law, by quadrature.
double base_expectation(const WeightSpec& s, const std::function<double(double)>& g,
                        double hint) {
    switch (s.kind) {
    case WeightKind::PointMass:
        return g(s.atom);
    case WeightKind::DiscreteTable: {
        double total = 0.0;
        for (std::size_t k = 0; k < s.atoms.size(); ++k) total += s.probs[k] * g(s.atoms[k]);
        return total;
    }
    case WeightKind::Exponential: {
        // x = e^v / rate maps (0, inf) to the real line with exponential decay at both ends.
        auto f = [&](double v) {
            double x = std::exp(v) / s.rate;
            return g(x) * std::exp(-s.rate * x) * s.rate * x;
        };
        std::vector<double> br{0.0};
        if (hint > 0.0 && std::isfinite(hint)) br.push_back(std::log(hint * s.rate));
        return integrate_split(f, -60.0, 8.0, br) ;
    }
    case WeightKind::Uniform: {
        auto f = [&](double x) { return g(x) / (s.hi - s.lo); };
        std::vector<double> br;
        if (hint > s.lo && hint < s.hi) br.push_back(hint);
        return integrate_split(f, s.lo, s.hi, br);
    }
    case WeightKind::PowerTail: {
        double p = tail_mass(s);
        double c = s.cutoff;
        auto body = [&](double x) { return g(x) * (1.0 - p) / c; };
        std::vector<double> br;
        if (hint > 0.0 && hint < c) br.push_back(hint);
        double total = integrate_split(body, 0.0, c, br);
        // Tail with x = c e^v.
        auto tail = [&](double v) {
            double weight = s.tail_const * (s.gamma + 1.0) * std::exp(-(s.gamma + 1.0) * (std::log(c) + v));
            if (!(weight > 0.0)) return 0.0;
            double gx = g(c * std::exp(v));
            return std::isfinite(gx) ? gx * weight : 0.0;
        };
        std::vector<double> tbr;
        if (hint > c && std::isfinite(hint)) tbr.push_back(std::log(hint / c));
        total += integrate_split(tail, 0.0, kInf, tbr);
        return total;
    }
    }
    throw std::logic_error("unknown weight kind");
}

}  // namespace

WeightSpec WeightSpec::point_mass(double a, char label) {
    WeightSpec s;
    s.kind = WeightKind::PointMass;
    s.atom = a;
    s.label = label;
    s.validate();
    return s;
}

WeightSpec WeightSpec::exponential(double rate, char label) {
    WeightSpec s;
    s.kind = WeightKind::Exponential;
    s.rate = rate;
    s.label = label;
    s.validate();
    return s;
}

WeightSpec WeightSpec::uniform(double lo, double hi, char label) {
    WeightSpec s;
    s.kind = WeightKind::Uniform;
    s.lo = lo;
    s.hi = hi;
    s.label = label;
    s.validate();
    return s;
}

WeightSpec WeightSpec::discrete(std::vector<double> atoms, std::vector<double> probs, char label) {
    WeightSpec s;
    s.kind = WeightKind::DiscreteTable;
    s.atoms = std::move(atoms);
    s.probs = std::move(probs);
    s.label = label;
    double total = std::accumulate(s.probs.begin(), s.probs.end(), 0.0);
    if (total > 0.0)
        for (double& p : s.probs) p /= total;
    s.validate();
    return s;
}

WeightSpec WeightSpec::power_tail(double gamma, double tail_const, double cutoff, char label) {
    WeightSpec s;
    s.kind = WeightKind::PowerTail;
    s.gamma = gamma;
    s.tail_const = tail_const;
    s.cutoff = cutoff;
    s.label = label;
    s.validate();
    return s;
}

void WeightSpec::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("weight scale must be positive");
    if (label != 'b' && label != 'w') throw std::invalid_argument("weight label must be 'b' or 'w'");
    switch (kind) {
    case WeightKind::PointMass:
        if (!(atom > 0.0)) throw std::invalid_argument("point mass must sit at a positive value");
        break;
    case WeightKind::Exponential:
        if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
        break;
    case WeightKind::Uniform:
        if (!(lo >= 0.0) || !(hi > lo)) throw std::invalid_argument("uniform support must satisfy 0 <= lo < hi");
        break;
    case WeightKind::DiscreteTable:
        if (atoms.empty() || atoms.size() != probs.size())
            throw std::invalid_argument("discrete table needs matching atoms and probabilities");
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            if (!(atoms[k] > 0.0)) throw std::invalid_argument("discrete atoms must be positive");
            if (!(probs[k] >= 0.0)) throw std::invalid_argument("discrete probabilities must be nonnegative");
        }
        if (std::fabs(std::accumulate(probs.begin(), probs.end(), 0.0) - 1.0) > 1e-12)
            throw std::invalid_argument("discrete probabilities must sum to one");
        break;
    case WeightKind::PowerTail:
        if (!(gamma > 1.0 && gamma < 2.0)) throw std::invalid_argument("power-tail index must lie in (1,2)");
        if (!(tail_const > 0.0) || !(cutoff > 0.0)) throw std::invalid_argument("power-tail constants must be positive");
        if (tail_mass(*this) > 1.0)
            throw std::invalid_argument("power-tail survival at the cutoff exceeds one");
        break;
    }
}

double WeightSpec::effective_tail_const() const {
    if (kind != WeightKind::PowerTail) return 0.0;
    return tail_const * std::pow(scale, gamma + 1.0);
}

std::string WeightSpec::kind_name() const {
    switch (kind) {
    case WeightKind::PointMass: return "point-mass";
    case WeightKind::Exponential: return "exponential";
    case WeightKind::Uniform: return "uniform";
    case WeightKind::DiscreteTable: return "discrete-table";
    case WeightKind::PowerTail: return "power-tail";
    }
    return "unknown";
}

double moment(const WeightSpec& s, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("moment order must be positive");
    double base = 0.0;
    switch (s.kind) {
    case WeightKind::PointMass:
        base = std::pow(s.atom, r);
        break;
    case WeightKind::Exponential:
        base = std::tgamma(r + 1.0) / std::pow(s.rate, r);
        break;
    case WeightKind::Uniform:
        base = (std::pow(s.hi, r + 1.0) - std::pow(s.lo, r + 1.0)) / ((r + 1.0) * (s.hi - s.lo));
        break;
    case WeightKind::DiscreteTable:
        for (std::size_t k = 0; k < s.atoms.size(); ++k) base += s.probs[k] * std::pow(s.atoms[k], r);
        break;
    case WeightKind::PowerTail: {
        if (r >= s.gamma + 1.0) return kInf;
        double p = tail_mass(s);
        base = (1.0 - p) * std::pow(s.cutoff, r) / (r + 1.0) +
               s.tail_const * (s.gamma + 1.0) * std::pow(s.cutoff, r - s.gamma - 1.0) / (s.gamma + 1.0 - r);
        break;
    }
    }
    return std::pow(s.scale, r) * base;
}

double moment_quadrature(const WeightSpec& s, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("moment order must be positive");
    if (s.kind == WeightKind::PowerTail && r >= s.gamma + 1.0) return kInf;
    double base = base_expectation(s, [r](double x) { return std::pow(x, r); }, 0.0);
    return std::pow(s.scale, r) * base;
}

double expectation_quadrature(const WeightSpec& s, const std::function<double(double)>& g) {
    return base_expectation(s, [&](double x) { return g(s.scale * x); }, 0.0);
}

double survival(const WeightSpec& s, double x) {
    double u = x / s.scale;
    if (u <= 0.0) return 1.0;
    switch (s.kind) {
    case WeightKind::PointMass:
        return u < s.atom ? 1.0 : 0.0;
    case WeightKind::Exponential:
        return std::exp(-s.rate * u);
    case WeightKind::Uniform:
        if (u <= s.lo) return 1.0;
        if (u >= s.hi) return 0.0;
        return (s.hi - u) / (s.hi - s.lo);
    case WeightKind::DiscreteTable: {
        double tot = 0.0;
        for (std::size_t k = 0; k < s.atoms.size(); ++k)
            if (s.atoms[k] > u) tot += s.probs[k];
        return tot;
    }
    case WeightKind::PowerTail: {
        double p = tail_mass(s);
        if (u >= s.cutoff) return s.tail_const * std::pow(u, -s.gamma - 1.0);
        return 1.0 - (1.0 - p) * u / s.cutoff;
    }
    }
    return 0.0;
}

double sample_weight(const WeightSpec& s, Rng& rng) {
    double x = 0.0;
    switch (s.kind) {
    case WeightKind::PointMass:
        x = s.atom;
        break;
    case WeightKind::Exponential:
        x = exponential(rng, s.rate);
        break;
    case WeightKind::Uniform:
        x = s.lo + (s.hi - s.lo) * uniform_open(rng);
        break;
    case WeightKind::DiscreteTable: {
        double u = uniform_open(rng);
        std::size_t k = 0;
        double acc = s.probs[0];
        while (u > acc && k + 1 < s.atoms.size()) acc += s.probs[++k];
        x = s.atoms[k];
        break;
    }
    case WeightKind::PowerTail: {
        double p = tail_mass(s);
        if (uniform_open(rng) < p)
            x = s.cutoff * std::pow(uniform_open(rng), -1.0 / (s.gamma + 1.0));
        else
            x = s.cutoff * uniform_open(rng);
        break;
    }
    }
    return s.scale * x;
}

std::vector<double> sample_weights(const WeightSpec& spec, std::size_t count, std::uint64_t seed) {
    spec.validate();
    Rng rng = make_rng(seed, 0xB0B);
    std::vector<double> out(count);
    for (auto& v : out) v = sample_weight(spec, rng);
    return out;
}

double sample_size_biased(const WeightSpec& s, Rng& rng) {
    double x = 0.0;
    switch (s.kind) {
    case WeightKind::PointMass:
        x = s.atom;
        break;
    case WeightKind::Exponential:
        x = exponential(rng, s.rate) + exponential(rng, s.rate);
        break;
    case WeightKind::Uniform: {
        double u = uniform_open(rng);
        x = std::sqrt(s.lo * s.lo + u * (s.hi * s.hi - s.lo * s.lo));
        break;
    }
    case WeightKind::DiscreteTable: {
        double total = 0.0;
        for (std::size_t k = 0; k < s.atoms.size(); ++k) total += s.probs[k] * s.atoms[k];
        double u = uniform_open(rng) * total;
        std::size_t k = 0;
        double acc = s.probs[0] * s.atoms[0];
        while (u > acc && k + 1 < s.atoms.size()) {
            ++k;
            acc += s.probs[k] * s.atoms[k];
        }
        x = s.atoms[k];
        break;
    }
    case WeightKind::PowerTail: {
        double p = tail_mass(s);
        double c = s.cutoff;
        double body = (1.0 - p) * c / 2.0;
        double tail = s.tail_const * (s.gamma + 1.0) * std::pow(c, -s.gamma) / s.gamma;
        if (uniform_open(rng) * (body + tail) < body)
            x = c * std::sqrt(uniform_open(rng));
        else
            x = c * std::pow(uniform_open(rng), -1.0 / s.gamma);
        break;
    }
    }
    return s.scale * x;
}

double laplace_integral(const WeightSpec& s, double lambda) {
    double sc = s.scale;
    switch (s.kind) {
    case WeightKind::PointMass: {
        double a = sc * s.atom;
        return std::expm1(-lambda * a) * a;
    }
    case WeightKind::Exponential: {
        double r = s.rate / sc;
        double u = lambda / r;
        return -(u * (2.0 + u)) / ((1.0 + u) * (1.0 + u)) / r;
    }
    case WeightKind::DiscreteTable: {
        double total = 0.0;
        for (std::size_t k = 0; k < s.atoms.size(); ++k) {
            double a = sc * s.atoms[k];
            total += s.probs[k] * std::expm1(-lambda * a) * a;
        }
        return total;
    }
    default: {
        double hint = lambda > 0.0 ? 1.0 / (lambda * sc) : 0.0;
        return base_expectation(s, [&](double x0) { double x = sc * x0; return std::expm1(-lambda * x) * x; }, hint);
    }
    }
}

double laplace_integral_compensated(const WeightSpec& s, double lambda) {
    double sc = s.scale;
    switch (s.kind) {
    case WeightKind::PointMass: {
        double a = sc * s.atom;
        return expm1_compensated(lambda * a) * a;
    }
    case WeightKind::Exponential: {
        double r = s.rate / sc;
        double u = lambda / r;
        return u * u * (3.0 + 2.0 * u) / ((1.0 + u) * (1.0 + u)) / r;
    }
    case WeightKind::DiscreteTable: {
        double total = 0.0;
        for (std::size_t k = 0; k < s.atoms.size(); ++k) {
            double a = sc * s.atoms[k];
            total += s.probs[k] * expm1_compensated(lambda * a) * a;
        }
        return total;
    }
    default: {
        double hint = lambda > 0.0 ? 1.0 / (lambda * sc) : 0.0;
        return base_expectation(s, [&](double x0) { double x = sc * x0; return expm1_compensated(lambda * x) * x; }, hint);
    }
    }
}

std::string regime_name(Regime r) {
    switch (r) {
    case Regime::ThirdMoments: return "third-moments";
    case Regime::DominantHeavy: return "dominant-heavy";
    case Regime::MatchedHeavy: return "matched-heavy";
    }
    return "unknown";
}

double CriticalPair::z() const { return std::sqrt(static_cast<double>(m) * static_cast<double>(n)); }

double CriticalPair::rho() const { return moment(b, 2.0) / std::sqrt(theta); }

long companion_size(double theta, long n) {
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    // The small nudge keeps theta * n exact for representable products such as 0.3 * 10.
    return static_cast<long>(std::floor(theta * static_cast<double>(n) * (1.0 + 1e-14)));
}

CriticalPair make_critical_pair(WeightSpec b, WeightSpec w, double theta, long n) {
    b.validate();
    w.validate();
    if (n <= 0) throw std::invalid_argument("n must be positive");
    b.label = 'b';
    w.label = 'w';
    double s2b = moment(b, 2.0);
    double s2w = moment(w, 2.0);
    w.scale *= 1.0 / std::sqrt(s2b * s2w);
    CriticalPair p;
    p.b = b;
    p.w = w;
    p.theta = theta;
    p.n = n;
    p.m = companion_size(theta, n);
    if (p.m <= 0) throw std::invalid_argument("theta * n must be at least one");
    return p;
}

CriticalReport validate_critical_pair(const CriticalPair& pair) {
    pair.b.validate();
    pair.w.validate();
    if (pair.n <= 0 || pair.m <= 0) throw std::invalid_argument("vertex counts must be positive");
    if (pair.m != companion_size(pair.theta, pair.n))
        throw std::invalid_argument("m must equal floor(theta * n)");
    CriticalReport rep;
    rep.theta = pair.theta;
    rep.product = moment(pair.b, 2.0) * moment(pair.w, 2.0);
    if (std::fabs(rep.product - 1.0) > kCriticalTol)
        throw std::invalid_argument("pair is not critical: sigma2_b * sigma2_w = " + std::to_string(rep.product));
    rep.rho = pair.rho();
    bool hb = pair.b.is_power_tail();
    bool hw = pair.w.is_power_tail();
    if (!hb && !hw) {
        rep.regime = Regime::ThirdMoments;
    } else if (hb && !hw) {
        rep.regime = Regime::DominantHeavy;
        rep.alpha = pair.b.gamma;
    } else if (hb && hw && pair.w.gamma > pair.b.gamma) {
        rep.regime = Regime::DominantHeavy;
        rep.alpha = pair.b.gamma;
    } else if (hb && hw && pair.w.gamma == pair.b.gamma) {
        rep.regime = Regime::MatchedHeavy;
        rep.alpha = pair.b.gamma;
    } else {
        throw std::invalid_argument("heavier white tail than black tail is not a covered regime");
    }
    return rep;
}

void to_json(nlohmann::json& j, const WeightSpec& s) {
    j = nlohmann::json{{"kind", s.kind_name()}, {"label", std::string(1, s.label)}, {"scale", s.scale}};
    switch (s.kind) {
    case WeightKind::PointMass: j["atom"] = s.atom; break;
    case WeightKind::Exponential: j["rate"] = s.rate; break;
    case WeightKind::Uniform: j["lo"] = s.lo; j["hi"] = s.hi; break;
    case WeightKind::DiscreteTable: j["atoms"] = s.atoms; j["probs"] = s.probs; break;
    case WeightKind::PowerTail:
        j["gamma"] = s.gamma;
        j["tail_const"] = s.tail_const;
        j["cutoff"] = s.cutoff;
        break;
    }
}

void from_json(const nlohmann::json& j, WeightSpec& s) {
    std::string kind = j.at("kind").get<std::string>();
    std::string label = j.value("label", std::string("b"));
    char lab = label.empty() ? 'b' : label[0];
    if (kind == "point-mass") {
        s = WeightSpec::point_mass(j.value("atom", 1.0), lab);
    } else if (kind == "exponential") {
        s = WeightSpec::exponential(j.value("rate", 1.0), lab);
    } else if (kind == "uniform") {
        s = WeightSpec::uniform(j.value("lo", 0.0), j.value("hi", 1.0), lab);
    } else if (kind == "discrete-table") {
        s = WeightSpec::discrete(j.at("atoms").get<std::vector<double>>(),
                                 j.at("probs").get<std::vector<double>>(), lab);
    } else if (kind == "power-tail") {
        s = WeightSpec::power_tail(j.value("gamma", 1.5), j.value("tail_const", 1.0), j.value("cutoff", 1.0), lab);
    } else {
        throw std::invalid_argument("unknown weight kind '" + kind + "'");
    }
    s.scale = j.value("scale", 1.0);
    s.validate();
}

void to_json(nlohmann::json& j, const CriticalPair& p) {
    j = nlohmann::json{{"black", p.b}, {"white", p.w}, {"theta", p.theta}, {"n", p.n}, {"m", p.m}};
}

void from_json(const nlohmann::json& j, CriticalPair& p) {
    WeightSpec b = j.at("black").get<WeightSpec>();
    WeightSpec w = j.at("white").get<WeightSpec>();
    double theta = j.value("theta", 1.0);
    long n = j.at("n").get<long>();
    if (j.value("enforce_critical", true)) {
        p = make_critical_pair(b, w, theta, n);
    } else {
        p.b = b;
        p.w = w;
        p.theta = theta;
        p.n = n;
        p.m = j.contains("m") ? j.at("m").get<long>() : companion_size(theta, n);
    }
}

}  // namespace rig
