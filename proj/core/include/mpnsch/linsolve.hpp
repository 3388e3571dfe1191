#pragma once

// Sparse linear algebra backing the implicit solves: CSR matrices, a direct
// sparse LU, Krylov methods, and the monolithic velocity-pressure
// saddle-point solve with mean-zero pressure pinning.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mpnsch/errors.hpp"

namespace mpnsch {

// Triplet (row, col, value) used for assembly.
struct Triplet {
  int r = 0;
  int c = 0;
  double v = 0.0;
};

// Compressed-row sparse matrix; rows sorted by column, duplicates merged,
// explicit zeros dropped.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;  // size rows+1
  std::vector<int> col_idx;
  std::vector<double> val;
  bool symmetric = false;

  static SparseMatrix from_triplets(int rows, int cols,
                                    std::vector<Triplet> ts,
                                    bool symmetric = false);
  static SparseMatrix identity(int n);

  std::size_t nnz() const { return val.size(); }
  std::vector<double> apply(const std::vector<double>& x) const;
  SparseMatrix transposed() const;
};

enum class SolveMethod { DirectLU, CG, BiCGStab, GMRES };

struct SolveOptions {
  SolveMethod method = SolveMethod::DirectLU;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_iter = 10000;
  int gmres_restart = 50;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
};

// Thrown when a solve cannot meet its tolerance; carries the best iterate.
struct SolveError : std::runtime_error {
  enum class Kind { Breakdown, MaxIterExceeded };
  SolveError(Kind kind_, std::string what, std::vector<double> best_,
             double residual_)
      : std::runtime_error(std::move(what)),
        kind(kind_),
        best(std::move(best_)),
        residual(residual_) {}
  Kind kind;
  std::vector<double> best;
  double residual;
};

// Solve Ax = b to ||Ax - b|| <= max(abs_tol, rel_tol*||b||).
std::pair<std::vector<double>, SolveStats> solve(const SparseMatrix& A,
                                                 const std::vector<double>& b,
                                                 const SolveOptions& opts = {});

// Solve the saddle system  A u + B^T p = f,  B u = 0  with the pressure
// mean pinned to zero through a bordering row/column (the multiplier is
// structurally zero when the compatibility condition holds).
struct SaddleResult {
  std::vector<double> u;
  std::vector<double> p;
  SolveStats stats;
};
SaddleResult solve_saddle(const SparseMatrix& A, const SparseMatrix& B,
                          const std::vector<double>& f,
                          const SolveOptions& opts = {});

}  // namespace mpnsch
