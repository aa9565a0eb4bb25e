#include "lcpdl/locality_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lcpdl/error.hpp"

namespace lcpdl {

namespace {

Eigen::MatrixXd pairwise_distances(const Eigen::Ref<const Eigen::MatrixXd>& atoms) {
  const Eigen::Index k = atoms.cols();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index v = 0; v < k; ++v) {
    for (Eigen::Index j = v + 1; j < k; ++j) {
      dist(v, j) = dist(j, v) = (atoms.col(v) - atoms.col(j)).norm();
    }
  }
  return dist;
}

}  // namespace

int default_knn(Eigen::Index atoms) {
  return static_cast<int>(std::clamp<Eigen::Index>(atoms - 1, 0, 5));
}

double default_kernel_width(const Eigen::Ref<const Eigen::MatrixXd>& atoms) {
  const Eigen::Index k = atoms.cols();
  if (k < 2) return 1.0;
  const Eigen::MatrixXd dist = pairwise_distances(atoms);
  const double mean = dist.sum() / static_cast<double>(k * (k - 1));
  return mean > 0.0 ? mean : 1.0;
}

Eigen::MatrixXd atom_adjacency(const Eigen::Ref<const Eigen::MatrixXd>& atoms, int knn,
                               double delta) {
  if (!atoms.allFinite()) throw ValidationError("atom_adjacency: non-finite atom");
  if (!(delta > 0.0)) throw ValidationError("atom_adjacency: kernel width must be > 0");
  const Eigen::Index k = atoms.cols();
  if (k < 1) throw ValidationError("atom_adjacency: need at least one atom");
  const Eigen::Index neighbours = std::clamp<Eigen::Index>(knn, 0, k - 1);

  const Eigen::MatrixXd dist = pairwise_distances(atoms);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, k);
  std::vector<Eigen::Index> order(k);
  for (Eigen::Index v = 0; v < k; ++v) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return dist(v, a) < dist(v, b); });
    Eigen::Index taken = 0;
    for (Eigen::Index j : order) {
      if (taken == neighbours) break;
      if (j == v) continue;
      M(v, j) = std::exp(-dist(v, j) / delta);
      ++taken;
    }
  }
  return M.cwiseMax(M.transpose());
}

Eigen::MatrixXd laplacian(const Eigen::Ref<const Eigen::MatrixXd>& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw ValidationError("laplacian: adjacency not square");
  if ((adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("laplacian: adjacency is not symmetric");
  }
  Eigen::MatrixXd L = -adjacency;
  L.diagonal() += adjacency.rowwise().sum();
  return L;
}

double locality_energy(const Eigen::Ref<const Eigen::MatrixXd>& codes,
                       const Eigen::Ref<const Eigen::MatrixXd>& laplacian) {
  return codes.cwiseProduct(laplacian * codes).sum();
}

AtomGraph build_atom_graph(const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                           const GraphOptions& options) {
  AtomGraph g;
  g.knn = options.knn >= 0 ? std::min<int>(options.knn, std::max<int>(0, atoms.cols() - 1))
                           : default_knn(atoms.cols());
  g.delta = options.delta > 0.0 ? options.delta : default_kernel_width(atoms);
  g.adjacency = atom_adjacency(atoms, g.knn, g.delta);
  g.laplacian = laplacian(g.adjacency);
  return g;
}

}  // namespace lcpdl
