#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tdcp/constraint.hpp"
#include "tdcp/domain.hpp"
#include "tdcp/search_state.hpp"
#include "tdcp/solver.hpp"

namespace tdcp {

struct Pmf {
  std::vector<std::pair<int, double>> pairs;

  double probability(int value) const;
  double total() const;

  friend bool operator==(const Pmf&, const Pmf&) = default;
};

/// Distribution chosen by the value of one decision variable (endogenous
/// uncertainty). Resolved when the random variable is reached.
struct EndogenousPmf {
  VarId governor;
  std::vector<std::pair<int, Pmf>> cases;

  const Pmf& resolve(int governor_value) const;

  friend bool operator==(const EndogenousPmf&, const EndogenousPmf&) = default;
};

using RandomLaw = std::variant<Pmf, EndogenousPmf>;

struct VarFactor {
  VarId var;
};
struct OutputFactor {
  std::size_t output = 0;
};
/// ReifiedLe contributes 1 when lhs <= rhs, else 0.
using Factor = std::variant<VarFactor, ReifiedLe, OutputFactor>;

struct Term {
  double coeff = 1.0;
  std::vector<Factor> factors;
};

struct Expectation {
  std::vector<Term> terms;
};

/// Single chance constraint turned into the objective: maximise the
/// probability that `constraint` holds; a plan solves the problem when that
/// probability reaches `threshold`.
struct SatisfactionProbability {
  ConstraintSpec constraint;
  double threshold = 1.0;
};

enum class Sense : std::uint8_t { maximize, minimize };

struct Objective {
  Sense sense = Sense::maximize;
  std::variant<Expectation, SatisfactionProbability> mode;
};

struct Stage {
  std::vector<VarId> decisions;
  std::vector<VarId> randoms;
};

/// The stochastic constraint problem (V, S, D, P, C, theta, L) plus its
/// objective. Immutable once built; share it freely.
class Model {
 public:
  const VariableSet& variables() const { return *vars_; }
  const std::shared_ptr<const VariableSet>& variables_ptr() const { return vars_; }
  std::span<const std::string> outputs() const { return outputs_; }
  std::span<const ConstraintSpec> constraints() const { return constraints_; }
  const Objective& objective() const { return objective_; }
  std::span<const Stage> stages() const { return stages_; }
  std::optional<double> objective_bound() const { return objective_bound_; }

  const RandomLaw& law(VarId r) const;
  std::span<const VarId> random_vars() const { return random_vars_; }
  std::span<const VarId> decision_vars() const { return decision_vars_; }
  std::size_t output_index(std::string_view name) const;

  /// Pmf of `r` with any endogenous dependence resolved from `values`
  /// (indexed by variable index; the governor must be meaningful there).
  const Pmf& resolve_pmf(VarId r, std::span<const int> values) const;
  const Pmf& resolve_pmf(VarId r, const SearchState& state) const;

  /// Number of complete random-variable assignments, saturating at 2^63.
  std::uint64_t scenario_count() const;

 private:
  friend class ModelBuilder;
  Model() = default;
  void validate() const;

  std::shared_ptr<const VariableSet> vars_;
  std::vector<std::string> outputs_;
  std::vector<std::optional<RandomLaw>> laws_;  // by variable index
  std::vector<ConstraintSpec> constraints_;
  Objective objective_;
  std::vector<Stage> stages_;
  std::optional<double> objective_bound_;
  std::vector<VarId> random_vars_;
  std::vector<VarId> decision_vars_;
};

class ModelBuilder {
 public:
  VarId add_decision(std::string name, Domain domain);
  VarId add_random(std::string name, Domain domain, RandomLaw law);
  std::size_t add_output(std::string name);
  void add_constraint(ConstraintSpec c);
  void set_objective(Objective obj);
  void add_stage(Stage stage);
  /// Upper bound on |per-scenario objective|, used to validate the step reward.
  void set_objective_bound(double bound);

  /// Validates every model invariant; throws tdcp::Error.
  Model build() &&;

 private:
  std::vector<VariableDecl> decls_;
  std::vector<std::optional<RandomLaw>> laws_;
  std::vector<std::string> outputs_;
  std::vector<ConstraintSpec> constraints_;
  std::optional<Objective> objective_;
  std::vector<Stage> stages_;
  std::optional<double> bound_;
};

/// Product of per-variable probabilities of `scenario` (random variables in
/// declaration order) with endogenous pmfs resolved under `decisions`.
double scenario_probability(const Model& model, std::span<const int> scenario,
                            std::span<const Assignment> decisions);

/// Values of the functional outputs (e.g. shortest-path cost) for a total
/// assignment, `values` indexed by variable index.
std::vector<double> compute_outputs(const Model& model, std::span<const int> values);

/// Per-scenario objective sample. SatisfactionProbability yields 0 or 1.
double objective_value(const Model& model, std::span<const int> values, std::span<const double> outputs);
double objective_value(const Model& model, const SearchState& terminal);

Solver make_solver(const Model& model, SolverFingerprint fingerprint = {});

/// Stage order; decisions first within each stage (shuffled when a seed is
/// given), then randoms in declaration order.
std::vector<VarId> stage_variable_order(const Model& model, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace tdcp
