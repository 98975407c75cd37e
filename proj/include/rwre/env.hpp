#pragma once
// Random environments on Z^d. A transition vector assigns a weight to each of
// the 2d signed unit directions; all weights sit on the kappa-floored simplex
// {w : sum w = 1, w_i >= kappa}. Environments are drawn i.i.d. per site from
// an EnvironmentLaw, with each site's draw coming from its own hash-derived
// substream so windows can be extended without replay.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/lattice.hpp"
#include "rwre/rng.hpp"

namespace rwre {

struct EnvParams {
    int d = 1;
    double kappa = 0.1;  // ellipticity floor, in (0, 1/(2d)]

    void validate() const;
};

// Direction index convention: 2*axis for +e_{axis+1}, 2*axis+1 for -e_{axis+1}.
inline int dir_index(int axis, bool negative) { return 2 * axis + (negative ? 1 : 0); }

struct TransitionVector {
    std::vector<double> w;  // size 2d

    double plus(int axis) const { return w[static_cast<std::size_t>(2 * axis)]; }
    double minus(int axis) const { return w[static_cast<std::size_t>(2 * axis + 1)]; }
};

void validate_transition_vector(const TransitionVector& tv, const EnvParams& params,
                                double tol = 1e-12);

// Fixed-capacity row used on the walk hot path (no allocation per step).
struct SiteTrans {
    std::array<double, 2 * kMaxDim> w{};
};

struct MixingParams {
    double C = 0.0;  // prefactor in the correlation bound; 0 means i.i.d.
    double g = 1.0;  // exponential correlation decay rate
    int r = 1;       // thickness of the boundary shell carrying the dependence

    void validate() const;
};

enum class LawKind { Homogeneous, IidDirichlet, FiniteSupport };

class EnvironmentLaw {
  public:
    static EnvironmentLaw homogeneous(EnvParams params, TransitionVector tv);
    // Affine embedding of a Dirichlet draw into the kappa-floored simplex:
    // w = kappa * 1 + (1 - 2d*kappa) * Dirichlet(concentration).
    static EnvironmentLaw iid_dirichlet(EnvParams params, std::vector<double> concentration);
    static EnvironmentLaw finite_support(EnvParams params, std::vector<TransitionVector> atoms,
                                         std::vector<double> probs);

    const EnvParams& params() const { return params_; }
    LawKind kind() const { return kind_; }
    const std::string& law_id() const { return law_id_; }

    TransitionVector sample(SplitMix64& rng) const;
    // Analytic mean transition vector (exact for all three kinds).
    TransitionVector mean_vector() const;

    const std::vector<TransitionVector>& atoms() const { return atoms_; }
    const std::vector<double>& atom_probs() const { return probs_; }
    const TransitionVector& homogeneous_vector() const { return atoms_.front(); }

  private:
    EnvironmentLaw() = default;

    EnvParams params_;
    LawKind kind_ = LawKind::Homogeneous;
    std::string law_id_;
    std::vector<double> concentration_;       // IidDirichlet
    std::vector<TransitionVector> atoms_;     // FiniteSupport / Homogeneous
    std::vector<double> probs_;               // FiniteSupport
};

// Deterministic per-site transition vector; pure function of (law, seed, site).
TransitionVector sample_transition_vector(const EnvironmentLaw& law, std::uint64_t seed,
                                          const Point& site);

class QuenchedEnvironment {
  public:
    QuenchedEnvironment() = default;
    QuenchedEnvironment(EnvParams params, LatticeBox window, std::string law_id,
                        std::uint64_t seed, std::vector<double> table);

    const EnvParams& params() const { return params_; }
    const LatticeBox& window() const { return window_; }
    const std::string& law_id() const { return law_id_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<double>& table() const { return table_; }

    bool defined_at(const Point& p) const { return window_.contains(p); }
    const double* row(const Point& p) const {
        return table_.data() + static_cast<std::size_t>(window_.index_of(p)) *
                                   static_cast<std::size_t>(2 * params_.d);
    }

    void validate(double tol = 1e-12) const;

  private:
    EnvParams params_;
    LatticeBox window_;
    std::string law_id_;
    std::uint64_t seed_ = 0;
    std::vector<double> table_;  // row-major over window sites, 2d weights per site
};

// Materializes the law over a window. Fails with CapacityError when the table
// would exceed max_bytes (default 2 GiB).
QuenchedEnvironment sample_environment(const EnvironmentLaw& law, const LatticeBox& window,
                                       std::uint64_t seed,
                                       std::uint64_t max_bytes = (2ULL << 30));

// Read access used by the walk: either a materialized table (errors outside
// its window) or the law itself sampled on demand (never runs out).
class EnvView {
  public:
    virtual ~EnvView() = default;
    virtual SiteTrans site(const Point& p) const = 0;
    virtual bool bounded() const = 0;
    int d() const { return d_; }
    double kappa() const { return kappa_; }

  protected:
    int d_ = 1;
    double kappa_ = 0.0;
};

class TableView final : public EnvView {
  public:
    explicit TableView(const QuenchedEnvironment& env);
    SiteTrans site(const Point& p) const override;
    bool bounded() const override { return true; }

  private:
    const QuenchedEnvironment* env_;
};

class LawView final : public EnvView {
  public:
    LawView(const EnvironmentLaw& law, std::uint64_t seed);
    SiteTrans site(const Point& p) const override;
    bool bounded() const override { return false; }

  private:
    const EnvironmentLaw* law_;
    std::uint64_t seed_;
    bool constant_;
    SiteTrans fixed_{};
};

// Floors the first 2d-1 coordinates of every atom to the grid
// kappa + (mesh) * {0..m}, mesh = (1 - 2d*kappa)/m, and assigns the last
// coordinate the leftover mass. Continuous laws are tallied from a fixed-seed
// sample so the result is a deterministic function of (law, m).
EnvironmentLaw quantize_law(const EnvironmentLaw& law, int m);

// Upper bound on the finite-range-dependence correction factor for a pair of
// disjoint scale-k boxes: exp(exp(-g*(9/11)*L_k) * 9 r^{2d} L_k^2 *
// (6 c_tilde Ltilde_k)^{2(d-1)} * C). Saturates at +inf on overflow.
double mixing_correction_bound(const MixingParams& mixing, int d, double L_k, double Ltilde_k,
                               double c_tilde);

// Self-describing JSON container; loader re-validates simplex invariants.
void save_environment(const QuenchedEnvironment& env, std::ostream& os);
QuenchedEnvironment load_environment(std::istream& is);
void save_environment_file(const QuenchedEnvironment& env, const std::string& path);
QuenchedEnvironment load_environment_file(const std::string& path);

}  // namespace rwre
