#include "lcpdl/dictionary_admm.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "lcpdl/error.hpp"

namespace lcpdl {

namespace {
constexpr double kRhoGrowth = 1.1;
}

void AdmmConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ValidationError("rho must be > 0");
  if (max_inner < 1) throw ValidationError("ADMM max_inner must be >= 1");
  if (!(primal_tol > 0.0)) throw ValidationError("ADMM primal_tol must be > 0");
}

Eigen::MatrixXd project_columns_unit_ball(const Eigen::Ref<const Eigen::MatrixXd>& columns) {
  Eigen::MatrixXd out = columns;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm > 1.0) out.col(j) /= norm;
  }
  return out;
}

AdmmResult solve_dictionary(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                            const Eigen::Ref<const Eigen::MatrixXd>& codes,
                            const Eigen::Ref<const Eigen::MatrixXd>& initial,
                            const AdmmConfig& config) {
  config.validate();
  const Eigen::Index k = codes.rows();
  if (codes.cols() != samples.cols() || initial.rows() != samples.rows() || initial.cols() != k) {
    throw ValidationError("dictionary update: dimension mismatch");
  }

  const Eigen::MatrixXd XAt = samples * codes.transpose();
  const Eigen::MatrixXd AAt = codes * codes.transpose();
  double rho = config.rho;

  auto factor = [&](double r) {
    Eigen::MatrixXd G = AAt;
    G.diagonal().array() += r;
    return Eigen::LLT<Eigen::MatrixXd>(G);
  };
  Eigen::LLT<Eigen::MatrixXd> llt = factor(rho);

  AdmmResult result;
  Eigen::MatrixXd S = project_columns_unit_ball(initial);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(S.rows(), S.cols());
  Eigen::MatrixXd D;
  for (int r = 0; r < config.max_inner; ++r) {
    // A A^T + rho I is symmetric, so solve the transposed system.
    D = llt.solve((XAt + rho * (S - T)).transpose()).transpose();
    const Eigen::MatrixXd previous = S;
    S = project_columns_unit_ball(D + T);
    T += D - S;
    if (!D.allFinite() || !T.allFinite()) {
      throw SolverError("dictionary update diverged at inner iteration " + std::to_string(r + 1) +
                        "; try another rho");
    }

    const double primal = (D - S).norm();
    const double dual = rho * (S - previous).norm();
    result.primal_residuals.push_back(primal);
    result.dual_residuals.push_back(dual);
    result.iterations = r + 1;
    if (primal <= config.primal_tol && dual <= config.primal_tol) break;

    if (config.adaptive) {
      rho *= kRhoGrowth;
      T /= kRhoGrowth;  // scaled dual tracks 1 / rho
      llt = factor(rho);
    }
  }
  result.atoms = std::move(S);
  return result;
}

}  // namespace lcpdl
