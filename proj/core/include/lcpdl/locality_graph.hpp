#pragma once

#include <Eigen/Core>

namespace lcpdl {

/// kNN graph over the atoms of one class dictionary and its Laplacian.
struct AtomGraph {
  Eigen::MatrixXd adjacency;  // k x k, symmetric, zero diagonal, entries in [0, 1]
  Eigen::MatrixXd laplacian;  // diag(row sums) - adjacency
  int knn = 0;
  double delta = 1.0;
};

/// Neighbour count and kernel width; non-positive values select the defaults.
struct GraphOptions {
  int knn = -1;
  double delta = 0.0;
};

/// min(5, k - 1).
int default_knn(Eigen::Index atoms);

/// Mean pairwise Euclidean distance between atoms, or 1.0 when all atoms coincide.
double default_kernel_width(const Eigen::Ref<const Eigen::MatrixXd>& atoms);

/// Heat-kernel weights exp(-||d_v - d_j|| / delta) on the knn nearest atoms of
/// each atom, symmetrized with max(M, M^T). knn is clamped to [0, k - 1]; ties in
/// distance go to the lower atom index.
Eigen::MatrixXd atom_adjacency(const Eigen::Ref<const Eigen::MatrixXd>& atoms, int knn,
                               double delta);

/// L = diag(M 1) - M. Rejects adjacency matrices that are not symmetric to 1e-10.
Eigen::MatrixXd laplacian(const Eigen::Ref<const Eigen::MatrixXd>& adjacency);

/// Tr(A^T L A) for codes A (k x N_i).
double locality_energy(const Eigen::Ref<const Eigen::MatrixXd>& codes,
                       const Eigen::Ref<const Eigen::MatrixXd>& laplacian);

AtomGraph build_atom_graph(const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                           const GraphOptions& options = {});

}  // namespace lcpdl
