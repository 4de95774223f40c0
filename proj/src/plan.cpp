#include "tdcp/plan.hpp"

#include <sstream>

#include "tdcp/error.hpp"
#include "tdcp/model.hpp"

namespace tdcp {

int Plan::value_of(VarId v) const {
  for (const auto& a : decisions) {
    if (a.var == v) return a.value;
  }
  throw ContractViolation("plan does not assign variable index " + std::to_string(v.index));
}

std::vector<int> Plan::values() const {
  std::vector<int> out;
  out.reserve(decisions.size());
  for (const auto& a : decisions) out.push_back(a.value);
  return out;
}

std::string plan_to_string(const Model& model, const Plan& plan) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < plan.decisions.size(); ++i) {
    os << (i ? " " : "") << model.variables().decl(plan.decisions[i].var).name << '=' << plan.decisions[i].value;
  }
  os << ')';
  return os.str();
}

}  // namespace tdcp
