#include "cslammot/graph/marginalize.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace cslammot::graph {

namespace {

bool touches(const Factor& f, const std::set<VariableId>& ids) {
  return std::any_of(f.variables.begin(), f.variables.end(), [&](const VariableId& v) { return ids.count(v) != 0; });
}

}  // namespace

FactorGraph marginalizeBefore(const FactorGraph& graph, const Values& linearization, int cutoff_stamp) {
  std::set<VariableId> dropped;
  for (const auto& id : graph.variables()) {
    if (id.stamp < cutoff_stamp) dropped.insert(id);
  }
  if (dropped.empty()) return graph;

  std::vector<const Factor*> affected;
  FactorGraph out;
  for (const auto& id : graph.variables()) {
    if (!dropped.count(id)) out.addVariable(id);
  }
  std::set<VariableId> separator;
  for (const auto& f : graph.factors()) {
    if (touches(f, dropped)) {
      affected.push_back(&f);
      for (const auto& v : f.variables) {
        if (!dropped.count(v)) separator.insert(v);
      }
    } else {
      out.addFactor(f);
    }
  }
  if (separator.empty()) return out;

  // Dropped block first, separator after.
  std::map<VariableId, int> offset;
  int dm = 0;
  for (const auto& id : dropped) {
    offset[id] = dm;
    dm += id.dim();
  }
  int dk = 0;
  for (const auto& id : separator) {
    offset[id] = dm + dk;
    dk += id.dim();
  }
  const int n = dm + dk;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (const Factor* f : affected) {
    const FactorLinearization lin = linearizeFactor(*f, linearization);
    for (std::size_t i = 0; i < f->variables.size(); ++i) {
      const int oi = offset.at(f->variables[i]);
      const auto& ji = lin.jacobians[i];
      g.segment(oi, ji.cols()) += ji.transpose() * lin.error;
      for (std::size_t j = 0; j < f->variables.size(); ++j) {
        const auto& jj = lin.jacobians[j];
        h.block(oi, offset.at(f->variables[j]), ji.cols(), jj.cols()) += ji.transpose() * jj;
      }
    }
  }

  // Schur complement onto the separator, using a pseudo-inverse of the dropped block.
  const Eigen::MatrixXd hmm = h.topLeftCorner(dm, dm);
  const Eigen::MatrixXd hmk = h.topRightCorner(dm, dk);
  const Eigen::MatrixXd hkk = h.bottomRightCorner(dk, dk);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_m(hmm);
  const Eigen::VectorXd lm = es_m.eigenvalues();
  const double tol_m = std::max(1.0, lm.cwiseAbs().maxCoeff()) * 1e-12;
  Eigen::VectorXd inv_lm = Eigen::VectorXd::Zero(dm);
  for (int i = 0; i < dm; ++i) inv_lm[i] = lm[i] > tol_m ? 1.0 / lm[i] : 0.0;
  const Eigen::MatrixXd hmm_inv = es_m.eigenvectors() * inv_lm.asDiagonal() * es_m.eigenvectors().transpose();

  Eigen::MatrixXd h_marg = hkk - hmk.transpose() * hmm_inv * hmk;
  h_marg = 0.5 * (h_marg + h_marg.transpose());
  const Eigen::VectorXd g_marg = g.tail(dk) - hmk.transpose() * hmm_inv * g.head(dm);

  // Factor as ||J d + r||^2 with J'J = H and J'r = g.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h_marg);
  const Eigen::VectorXd lk = es.eigenvalues();
  const double tol_k = std::max(1.0, lk.cwiseAbs().maxCoeff()) * 1e-12;
  std::vector<int> keep;
  for (int i = 0; i < dk; ++i) {
    if (lk[i] > tol_k) keep.push_back(i);
  }
  if (keep.empty()) return out;
  MarginalTerm term;
  term.jacobian.resize(static_cast<int>(keep.size()), dk);
  term.residual.resize(static_cast<int>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const int i = keep[r];
    const Eigen::VectorXd v = es.eigenvectors().col(i);
    const double s = std::sqrt(lk[i]);
    term.jacobian.row(static_cast<int>(r)) = s * v.transpose();
    term.residual[static_cast<int>(r)] = v.dot(g_marg) / s;
  }
  Factor marginal;
  marginal.kind = FactorKind::kMarginal;
  for (const auto& id : separator) {
    marginal.variables.push_back(id);
    term.linearization_point.push_back(linearization.at(id));
  }
  marginal.information = Eigen::MatrixXd::Identity(term.residual.size(), term.residual.size());
  marginal.marginal = std::move(term);
  out.addFactor(std::move(marginal));
  return out;
}

FactorGraph slideWindow(const FactorGraph& graph, const Values& linearization, int horizon) {
  if (horizon < 2) throw std::invalid_argument("slideWindow: horizon must be at least 2");
  const auto range = graph.stampRange();
  if (!range) return graph;
  return marginalizeBefore(graph, linearization, range->second - horizon + 1);
}

namespace {

void writeValue(std::ostream& out, const Value& v) {
  char buf[96];
  if (const auto* p = std::get_if<Pose2>(&v)) {
    std::snprintf(buf, sizeof buf, " %.17g %.17g %.17g", p->x(), p->y(), p->yaw());
  } else {
    const auto& vel = std::get<Velocity2>(v);
    std::snprintf(buf, sizeof buf, " %.17g %.17g", vel.v, vel.omega);
  }
  out << buf;
}

void writeMatrix(std::ostream& out, const Eigen::MatrixXd& m) {
  char buf[32];
  out << ' ' << m.rows() << 'x' << m.cols();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, " %.17g", m(r, c));
      out << buf;
    }
  }
}

}  // namespace

void writeSnapshot(std::ostream& out, const FactorGraph& graph, const Values& values) {
  for (const auto& id : graph.variables()) {
    out << "var " << toString(id);
    if (values.contains(id)) writeValue(out, values.at(id));
    out << '\n';
  }
  for (std::size_t i = 0; i < graph.factors().size(); ++i) {
    const Factor& f = graph.factors()[i];
    out << "factor " << i << ' ' << toString(f.kind) << " [";
    for (std::size_t j = 0; j < f.variables.size(); ++j) out << (j ? " " : "") << toString(f.variables[j]);
    out << ']';
    switch (f.kind) {
      case FactorKind::kVelocityPrior: writeValue(out, f.velocity_measurement); break;
      case FactorKind::kVelocity: break;
      case FactorKind::kMotion: out << " dt " << f.dt; break;
      case FactorKind::kMarginal: break;
      default: writeValue(out, f.measurement); break;
    }
    if (f.kind == FactorKind::kMarginal) {
      writeMatrix(out, f.marginal->jacobian);
    } else if (f.mixture.empty()) {
      writeMatrix(out, f.information);
    } else {
      out << " mixture " << f.mixture.size();
      for (const auto& c : f.mixture) {
        out << " {w " << c.weight << " target " << c.target;
        writeValue(out, c.measurement);
        writeMatrix(out, c.information);
        out << '}';
      }
    }
    out << '\n';
  }
}

}  // namespace cslammot::graph
