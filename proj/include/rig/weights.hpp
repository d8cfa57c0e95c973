#ifndef RIG_WEIGHTS_HPP
#define RIG_WEIGHTS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include <rig/rng.hpp>

namespace rig {

// Tolerance on sigma_2^b * sigma_2^w = 1.
constexpr double kCriticalTol = 1e-12;

enum class WeightKind { PointMass, Exponential, Uniform, DiscreteTable, PowerTail };

// A weight law on (0, inf). Every kind is a base law multiplied by `scale`.
//
// PowerTail is a mixture: uniform on (0, cutoff) with mass 1 - p and an exact
// Pareto piece above the cutoff with survival tail_const * x^{-gamma-1}, where
// p = tail_const * cutoff^{-gamma-1}. The survival function is continuous.
struct WeightSpec {
    WeightKind kind = WeightKind::PointMass;
    double atom = 1.0;
    double rate = 1.0;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> atoms;
    std::vector<double> probs;
    double gamma = 1.5;
    double tail_const = 1.0;
    double cutoff = 1.0;
    double scale = 1.0;
    char label = 'b';

    static WeightSpec point_mass(double a, char label = 'b');
    static WeightSpec exponential(double rate, char label = 'b');
    static WeightSpec uniform(double lo, double hi, char label = 'b');
    static WeightSpec discrete(std::vector<double> atoms, std::vector<double> probs, char label = 'b');
    static WeightSpec power_tail(double gamma, double tail_const, double cutoff, char label = 'b');

    void validate() const;
    bool is_power_tail() const { return kind == WeightKind::PowerTail; }
    // Tail constant of the scaled law: 1 - F(x) = C x^{-gamma-1} above scale * cutoff.
    double effective_tail_const() const;
    double effective_cutoff() const { return cutoff * scale; }
    std::string kind_name() const;
};

// r-th moment; closed form for every kind, +inf when the integral diverges.
double moment(const WeightSpec& spec, double r);
// r-th moment by adaptive quadrature against the density (atoms are summed).
double moment_quadrature(const WeightSpec& spec, double r);

double survival(const WeightSpec& spec, double x);

double sample_weight(const WeightSpec& spec, Rng& rng);
std::vector<double> sample_weights(const WeightSpec& spec, std::size_t count, std::uint64_t seed);
// Draw from the size-biased law x dF(x) / sigma_1.
double sample_size_biased(const WeightSpec& spec, Rng& rng);

// int (e^{-lambda x} - 1) x dF(x)
double laplace_integral(const WeightSpec& spec, double lambda);
// int (e^{-lambda x} - 1 + lambda x) x dF(x)
double laplace_integral_compensated(const WeightSpec& spec, double lambda);
// Generic E[g(X)] by quadrature against the density.
double expectation_quadrature(const WeightSpec& spec, const std::function<double(double)>& g);

enum class Regime { ThirdMoments, DominantHeavy, MatchedHeavy };
std::string regime_name(Regime r);

struct CriticalPair {
    WeightSpec b;
    WeightSpec w;
    double theta = 1.0;
    long n = 1;
    long m = 1;

    double z() const;
    double rho() const;
};

struct CriticalReport {
    double theta = 0.0;
    double rho = 0.0;
    Regime regime = Regime::ThirdMoments;
    double product = 0.0;
    double alpha = 2.0;
};

long companion_size(double theta, long n);

// Rescales the white law so that sigma_2^b * sigma_2^w = 1 and sets m = floor(theta n).
CriticalPair make_critical_pair(WeightSpec b, WeightSpec w, double theta, long n);

// Throws std::invalid_argument when the pair is not critical or m != floor(theta n).
CriticalReport validate_critical_pair(const CriticalPair& pair);

void to_json(nlohmann::json& j, const WeightSpec& s);
void from_json(const nlohmann::json& j, WeightSpec& s);
void to_json(nlohmann::json& j, const CriticalPair& p);
void from_json(const nlohmann::json& j, CriticalPair& p);

}  // namespace rig

#endif
