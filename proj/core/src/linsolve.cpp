#include "mpnsch/linsolve.hpp"

#include "mpnsch/grid.hpp"  // require_size

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace mpnsch {

namespace {

using EigenCsr = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

EigenCsr to_eigen(const SparseMatrix& A) {
  EigenCsr M(A.rows, A.cols);
  std::vector<Eigen::Triplet<double>> ts;
  ts.reserve(A.nnz());
  for (int r = 0; r < A.rows; ++r)
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
      ts.emplace_back(r, A.col_idx[k], A.val[k]);
  M.setFromTriplets(ts.begin(), ts.end());
  M.makeCompressed();
  return M;
}

double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double residual_norm(const SparseMatrix& A, const std::vector<double>& x,
                     const std::vector<double>& b) {
  std::vector<double> r = A.apply(x);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= b[k];
  return norm2(r);
}

// Restarted GMRES with Givens rotations, no preconditioner. Hand-rolled so
// the failure modes carry the best iterate and true residual.
std::pair<std::vector<double>, SolveStats> gmres(const SparseMatrix& A,
                                                 const std::vector<double>& b,
                                                 const SolveOptions& opts,
                                                 double target) {
  const int n = A.rows;
  const int m = std::max(1, opts.gmres_restart);
  std::vector<double> x(n, 0.0);
  int total_iters = 0;
  double rnorm = norm2(b);

  while (total_iters < opts.max_iter) {
    std::vector<double> r = A.apply(x);
    for (int k = 0; k < n; ++k) r[k] = b[k] - r[k];
    rnorm = norm2(r);
    if (rnorm <= target) return {x, {total_iters, rnorm}};

    std::vector<std::vector<double>> V;
    V.push_back(r);
    for (int k = 0; k < n; ++k) V[0][k] /= rnorm;
    // Hessenberg in compact form, plus Givens sines/cosines and rhs g.
    std::vector<std::vector<double>> H;
    std::vector<double> cs(m + 1, 0.0), sn(m + 1, 0.0), gvec(m + 1, 0.0);
    gvec[0] = rnorm;

    int k = 0;
    for (; k < m && total_iters < opts.max_iter; ++k, ++total_iters) {
      std::vector<double> w = A.apply(V[k]);
      std::vector<double> h(k + 2, 0.0);
      for (int i = 0; i <= k; ++i) {
        double dot = 0.0;
        for (int t = 0; t < n; ++t) dot += w[t] * V[i][t];
        h[i] = dot;
        for (int t = 0; t < n; ++t) w[t] -= dot * V[i][t];
      }
      h[k + 1] = norm2(w);
      if (h[k + 1] > 0.0) {
        std::vector<double> vk = w;
        for (int t = 0; t < n; ++t) vk[t] /= h[k + 1];
        V.push_back(std::move(vk));
      }
      // Apply accumulated rotations, then the new one.
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * h[i] + sn[i] * h[i + 1];
        h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
        h[i] = t;
      }
      const double denom = std::hypot(h[k], h[k + 1]);
      if (denom == 0.0)
        throw SolveError(SolveError::Kind::Breakdown,
                         "GMRES breakdown: zero Hessenberg column", x, rnorm);
      cs[k] = h[k] / denom;
      sn[k] = h[k + 1] / denom;
      h[k] = denom;
      h[k + 1] = 0.0;
      gvec[k + 1] = -sn[k] * gvec[k];
      gvec[k] = cs[k] * gvec[k];
      H.push_back(h);
      rnorm = std::abs(gvec[k + 1]);
      if (rnorm <= target || h.back() == 0.0) {
        ++k;
        ++total_iters;
        break;
      }
    }
    // Back-substitute y from the triangular H and update x.
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = gvec[i];
      for (int t = i + 1; t < k; ++t) s -= H[t][i] * y[t];
      if (H[i][i] == 0.0)
        throw SolveError(SolveError::Kind::Breakdown,
                         "GMRES breakdown: singular projected system", x,
                         rnorm);
      y[i] = s / H[i][i];
    }
    for (int i = 0; i < k; ++i)
      for (int t = 0; t < n; ++t) x[t] += y[i] * V[i][t];
  }
  const double final_res = residual_norm(A, x, b);
  if (final_res <= target) return {x, {total_iters, final_res}};
  throw SolveError(SolveError::Kind::MaxIterExceeded,
                   "GMRES did not reach tolerance in " +
                       std::to_string(opts.max_iter) + " iterations",
                   x, final_res);
}

template <class EigenSolver>
std::pair<std::vector<double>, SolveStats> eigen_krylov(
    const SparseMatrix& A, const std::vector<double>& b,
    const SolveOptions& opts, double target, double bnorm,
    const char* name) {
  EigenCsr M = to_eigen(A);
  EigenSolver solver;
  solver.setMaxIterations(opts.max_iter);
  solver.setTolerance(target / (bnorm > 0.0 ? bnorm : 1.0));
  solver.compute(M);
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  Eigen::VectorXd x = solver.solve(rhs);
  std::vector<double> xv(x.data(), x.data() + x.size());
  const double res = residual_norm(A, xv, b);
  if (res <= target)
    return {xv, {static_cast<int>(solver.iterations()), res}};
  if (solver.info() == Eigen::NumericalIssue)
    throw SolveError(SolveError::Kind::Breakdown,
                     std::string(name) + " numerical breakdown", xv, res);
  throw SolveError(SolveError::Kind::MaxIterExceeded,
                   std::string(name) + " did not reach tolerance in " +
                       std::to_string(opts.max_iter) + " iterations",
                   xv, res);
}

}  // namespace

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<Triplet> ts,
                                         bool symmetric) {
  for (const Triplet& t : ts)
    if (t.r < 0 || t.r >= rows || t.c < 0 || t.c >= cols)
      throw SizeMismatch("from_triplets: index (" + std::to_string(t.r) +
                         ", " + std::to_string(t.c) + ") outside " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  std::sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });
  SparseMatrix A;
  A.rows = rows;
  A.cols = cols;
  A.symmetric = symmetric;
  A.row_ptr.assign(rows + 1, 0);
  A.col_idx.reserve(ts.size());
  A.val.reserve(ts.size());
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r) {
    while (k < ts.size() && ts[k].r == r) {
      const int c = ts[k].c;
      double v = 0.0;
      while (k < ts.size() && ts[k].r == r && ts[k].c == c) v += ts[k++].v;
      if (v != 0.0) {
        A.col_idx.push_back(c);
        A.val.push_back(v);
      }
    }
    A.row_ptr[r + 1] = static_cast<int>(A.col_idx.size());
  }
  return A;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> ts;
  ts.reserve(n);
  for (int i = 0; i < n; ++i) ts.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(ts), true);
}

std::vector<double> SparseMatrix::apply(const std::vector<double>& x) const {
  require_size(x.size(), cols, "SparseMatrix::apply");
  std::vector<double> y(rows, 0.0);
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      s += val[k] * x[col_idx[k]];
    y[r] = s;
  }
  return y;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Triplet> ts;
  ts.reserve(nnz());
  for (int r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      ts.push_back({col_idx[k], r, val[k]});
  return from_triplets(cols, rows, std::move(ts), symmetric);
}

std::pair<std::vector<double>, SolveStats> solve(const SparseMatrix& A,
                                                 const std::vector<double>& b,
                                                 const SolveOptions& opts) {
  if (A.rows != A.cols)
    throw SizeMismatch("solve: matrix must be square, got " +
                       std::to_string(A.rows) + "x" + std::to_string(A.cols));
  require_size(b.size(), A.rows, "solve: rhs");
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0))
    throw ValidationError({"solve: tolerances must be positive"});

  const double bnorm = norm2(b);
  const double target = std::max(opts.abs_tol, opts.rel_tol * bnorm);
  if (bnorm == 0.0) return {std::vector<double>(A.rows, 0.0), {0, 0.0}};

  switch (opts.method) {
    case SolveMethod::DirectLU: {
      Eigen::SparseMatrix<double, Eigen::ColMajor, int> M =
          to_eigen(A);  // SparseLU wants column-major
      Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>> lu;
      lu.analyzePattern(M);
      lu.factorize(M);
      if (lu.info() != Eigen::Success)
        throw SolveError(SolveError::Kind::Breakdown,
                         "DirectLU factorization failed (singular matrix?)",
                         std::vector<double>(A.rows, 0.0), bnorm);
      Eigen::VectorXd rhs =
          Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
      Eigen::VectorXd x = lu.solve(rhs);
      std::vector<double> xv(x.data(), x.data() + x.size());
      const double res = residual_norm(A, xv, b);
      if (res > target)
        throw SolveError(SolveError::Kind::Breakdown,
                         "DirectLU residual " + std::to_string(res) +
                             " above tolerance (ill-conditioned or singular)",
                         xv, res);
      return {xv, {1, res}};
    }
    case SolveMethod::CG:
      return eigen_krylov<Eigen::ConjugateGradient<
          EigenCsr, Eigen::Lower | Eigen::Upper,
          Eigen::DiagonalPreconditioner<double>>>(A, b, opts, target, bnorm,
                                                  "CG");
    case SolveMethod::BiCGStab:
      return eigen_krylov<
          Eigen::BiCGSTAB<EigenCsr, Eigen::DiagonalPreconditioner<double>>>(
          A, b, opts, target, bnorm, "BiCGStab");
    case SolveMethod::GMRES:
      return gmres(A, b, opts, target);
  }
  throw ValidationError({"solve: unknown method"});
}

SaddleResult solve_saddle(const SparseMatrix& A, const SparseMatrix& B,
                          const std::vector<double>& f,
                          const SolveOptions& opts) {
  if (A.rows != A.cols)
    throw SizeMismatch("solve_saddle: A must be square");
  if (B.cols != A.rows)
    throw SizeMismatch("solve_saddle: B column count must match A");
  require_size(f.size(), A.rows, "solve_saddle: rhs");
  const int n = A.rows, m = B.rows;

  // Bordered system [[A, B^T, 0], [B, 0, 1], [0, 1^T, 0]]: the last
  // row pins the pressure mean; the multiplier column keeps it square.
  std::vector<Triplet> ts;
  ts.reserve(A.nnz() + 2 * B.nnz() + 2 * m);
  for (int r = 0; r < A.rows; ++r)
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
      ts.push_back({r, A.col_idx[k], A.val[k]});
  for (int r = 0; r < m; ++r)
    for (int k = B.row_ptr[r]; k < B.row_ptr[r + 1]; ++k) {
      ts.push_back({n + r, B.col_idx[k], B.val[k]});       // B block
      ts.push_back({B.col_idx[k], n + r, B.val[k]});       // B^T block
    }
  for (int r = 0; r < m; ++r) {
    ts.push_back({n + r, n + m, 1.0});
    ts.push_back({n + m, n + r, 1.0});
  }
  SparseMatrix K = SparseMatrix::from_triplets(n + m + 1, n + m + 1,
                                               std::move(ts));
  std::vector<double> rhs(n + m + 1, 0.0);
  std::copy(f.begin(), f.end(), rhs.begin());

  SolveOptions sopts = opts;
  if (sopts.method == SolveMethod::CG)
    sopts.method = SolveMethod::DirectLU;  // bordered system is indefinite

  auto [x, stats] = solve(K, rhs, sopts);
  SaddleResult out;
  out.u.assign(x.begin(), x.begin() + n);
  out.p.assign(x.begin() + n, x.begin() + n + m);
  out.stats = stats;
  return out;
}

}  // namespace mpnsch
