#include "relmod/int_linalg.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include <boost/integer/common_factor_rt.hpp>

#include "relmod/error.hpp"

namespace relmod {

namespace {

using RationalRow = std::vector<Rational>;

std::vector<RationalRow> to_rational_rows(const IntegerMatrix& a) {
  std::vector<RationalRow> out(a.rows(), RationalRow(a.cols()));
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out[r][c] = Rational(a(r, c));
  return out;
}

// In-place reduced row echelon form; returns the pivot column of each
// nonzero row (rows past pivots.size() are zero).
std::vector<std::size_t> rref(std::vector<RationalRow>& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t cols = m.front().size();
  std::size_t lead = 0;
  for (std::size_t c = 0; c < cols && lead < m.size(); ++c) {
    std::size_t sel = lead;
    while (sel < m.size() && m[sel][c] == 0) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[sel], m[lead]);
    const Rational inv = 1 / m[lead][c];
    for (auto& x : m[lead]) x *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == lead || m[r][c] == 0) continue;
      const Rational f = m[r][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[lead][k];
    }
    pivots.push_back(c);
    ++lead;
  }
  return pivots;
}

// Incremental echelon basis: each stored row has a 1 at its pivot and zeros
// at the pivots of the rows stored before it.
class EchelonBasis {
 public:
  explicit EchelonBasis(std::size_t cols) : cols_(cols) {}

  // Reduces `v` in place; returns true iff it was independent (and adds it).
  bool reduce_and_insert(RationalRow v, bool insert = true) {
    for (std::size_t b = 0; b < rows_.size(); ++b) {
      const Rational f = v[pivots_[b]];
      if (f == 0) continue;
      for (std::size_t k = 0; k < cols_; ++k) v[k] -= f * rows_[b][k];
    }
    auto it = std::find_if(v.begin(), v.end(), [](const Rational& x) { return x != 0; });
    if (it == v.end()) return false;
    if (insert) {
      const std::size_t p = static_cast<std::size_t>(it - v.begin());
      const Rational inv = 1 / v[p];
      for (auto& x : v) x *= inv;
      rows_.push_back(std::move(v));
      pivots_.push_back(p);
    }
    return true;
  }

  std::size_t size() const { return rows_.size(); }

 private:
  std::size_t cols_;
  std::vector<RationalRow> rows_;
  std::vector<std::size_t> pivots_;
};

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void swap_cols(IntegerMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t r = 0; r < m.rows(); ++r) std::swap(m(r, a), m(r, b));
}

// col[dst] -= q * col[src]
void axpy_col(IntegerMatrix& m, std::size_t dst, std::size_t src, const BigInt& q) {
  for (std::size_t r = 0; r < m.rows(); ++r) m(r, dst) -= q * m(r, src);
}

void negate_col(IntegerMatrix& m, std::size_t c) {
  for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = -m(r, c);
}

Rational rational_det(std::vector<RationalRow> m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t sel = c;
    while (sel < n && m[sel][c] == 0) ++sel;
    if (sel == n) return 0;
    if (sel != c) {
      std::swap(m[sel], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      const Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

BigInt to_integer(const Rational& q) {
  if (boost::multiprecision::denominator(q) != 1)
    throw Error("internal: expected an integral rational");
  return boost::multiprecision::numerator(q);
}

}  // namespace

// ---------------------------------------------------------------------------
// IntegerMatrix

IntegerMatrix::IntegerMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

IntegerMatrix::IntegerMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("ragged matrix literal");
    for (auto v : r) data_.emplace_back(v);
  }
}

IntegerMatrix IntegerMatrix::identity(std::size_t n) {
  IntegerMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntegerMatrix IntegerMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  IntegerMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw InputError("ragged matrix: row " + std::to_string(r) +
                                                 " has " + std::to_string(rows[r].size()) +
                                                 " entries, expected " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<BigInt> IntegerMatrix::row(std::size_t r) const {
  return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
          data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
}

std::vector<BigInt> IntegerMatrix::col(std::size_t c) const {
  std::vector<BigInt> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

IntegerMatrix IntegerMatrix::transpose() const {
  IntegerMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

IntegerMatrix IntegerMatrix::row_block(std::size_t first, std::size_t count) const {
  if (first + count > rows_) throw InputError("row block out of range");
  IntegerMatrix out(count, cols_);
  std::copy(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((first + count) * cols_), out.data_.begin());
  return out;
}

IntegerMatrix IntegerMatrix::stacked(const IntegerMatrix& other) const {
  if (rows_ == 0) return other;
  if (other.rows_ == 0) return *this;
  if (other.cols_ != cols_) throw InputError("cannot stack matrices with different column counts");
  IntegerMatrix out(rows_ + other.rows_, cols_);
  std::copy(data_.begin(), data_.end(), out.data_.begin());
  std::copy(other.data_.begin(), other.data_.end(),
            out.data_.begin() + static_cast<std::ptrdiff_t>(data_.size()));
  return out;
}

bool IntegerMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const BigInt& x) { return x == 0; });
}

std::int64_t IntegerMatrix::as_int64(std::size_t r, std::size_t c) const {
  const BigInt& v = (*this)(r, c);
  if (v > BigInt(INT64_MAX) || v < BigInt(INT64_MIN))
    throw InputError("matrix entry does not fit in 64 bits");
  return static_cast<std::int64_t>(v);
}

std::vector<double> IntegerMatrix::to_double() const {
  std::vector<double> out(data_.size());
  std::transform(data_.begin(), data_.end(), out.begin(),
                 [](const BigInt& x) { return x.convert_to<double>(); });
  return out;
}

IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b) {
  if (a.cols_ != b.rows_) throw InputError("matrix product dimension mismatch");
  IntegerMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const BigInt& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

std::string IntegerMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t r = 0; r < rows_; ++r) {
    os << (r ? ", [" : "[");
    for (std::size_t c = 0; c < cols_; ++c) os << (c ? ", " : "") << (*this)(r, c);
    os << ']';
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// Hermite normal form and kernels

HnfResult hermite_normal_form(const IntegerMatrix& a) {
  if (a.empty()) throw InputError("hermite_normal_form: empty matrix");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  HnfResult res{a, IntegerMatrix::identity(n), 0, {}};
  IntegerMatrix& h = res.H;
  IntegerMatrix& u = res.U;
  std::size_t r = 0;

  for (std::size_t i = 0; i < m && r < n; ++i) {
    bool have_pivot = false;
    for (;;) {
      // Smallest nonzero |h(i,k)| over k >= r, lowest index on ties.
      std::size_t best = n;
      for (std::size_t k = r; k < n; ++k) {
        if (h(i, k) == 0) continue;
        if (best == n || abs(h(i, k)) < abs(h(i, best))) best = k;
      }
      if (best == n) break;
      have_pivot = true;
      swap_cols(h, r, best);
      swap_cols(u, r, best);
      bool remaining = false;
      for (std::size_t k = r + 1; k < n; ++k) {
        if (h(i, k) == 0) continue;
        const BigInt q = h(i, k) / h(i, r);
        axpy_col(h, k, r, q);
        axpy_col(u, k, r, q);
        if (h(i, k) != 0) remaining = true;
      }
      if (!remaining) break;
    }
    if (!have_pivot) continue;
    if (h(i, r) < 0) {
      negate_col(h, r);
      negate_col(u, r);
    }
    // Column r is zero on rows above i, so this leaves earlier rows intact.
    for (std::size_t j = 0; j < r; ++j) {
      const BigInt q = floor_div(h(i, j), h(i, r));
      if (q == 0) continue;
      axpy_col(h, j, r, q);
      axpy_col(u, j, r, q);
    }
    res.pivot_rows.push_back(i);
    ++r;
  }
  res.rank = r;
  return res;
}

KernelBasis integer_kernel_basis(const IntegerMatrix& a) {
  HnfResult hnf = hermite_normal_form(a);
  const std::size_t n = a.cols();
  if (hnf.rank >= n) throw InputError("model is saturated");
  const std::size_t k0 = n - hnf.rank;
  IntegerMatrix d(k0, n);
  for (std::size_t l = 0; l < k0; ++l)
    for (std::size_t c = 0; c < n; ++c) d(l, c) = hnf.U(c, hnf.rank + l);
  return {std::move(d)};
}

IntegerMatrix canonical_integer_basis(const IntegerMatrix& basis) {
  auto rows = to_rational_rows(basis);
  const auto pivots = rref(rows);
  IntegerMatrix out(pivots.size(), basis.cols());
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    BigInt lcm = 1;
    for (const auto& x : rows[r])
      if (x != 0) lcm = boost::integer::lcm(lcm, boost::multiprecision::denominator(x));
    BigInt g = 0;
    for (std::size_t c = 0; c < basis.cols(); ++c) {
      out(r, c) = to_integer(rows[r][c] * lcm);
      g = boost::integer::gcd(g, abs(out(r, c)));
    }
    if (g > 1)
      for (std::size_t c = 0; c < basis.cols(); ++c) out(r, c) /= g;
  }
  return out;
}

std::size_t rational_rank(const IntegerMatrix& a) {
  if (a.empty()) return 0;
  auto rows = to_rational_rows(a);
  return rref(rows).size();
}

bool row_space_contains(const IntegerMatrix& a, std::span<const Rational> v) {
  if (v.size() != a.cols())
    throw InputError("row_space_contains: vector length " + std::to_string(v.size()) +
                     " does not match " + std::to_string(a.cols()) + " columns");
  EchelonBasis basis(a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    RationalRow row(a.cols());
    for (std::size_t c = 0; c < a.cols(); ++c) row[c] = Rational(a(r, c));
    basis.reduce_and_insert(std::move(row));
  }
  return !basis.reduce_and_insert(RationalRow(v.begin(), v.end()), false);
}

bool row_space_contains(const IntegerMatrix& a, std::span<const std::int64_t> v) {
  RationalRow q(v.begin(), v.end());
  return row_space_contains(a, std::span<const Rational>(q));
}

std::vector<std::size_t> independent_rows(const IntegerMatrix& a) {
  EchelonBasis basis(a.cols());
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    RationalRow row(a.cols());
    for (std::size_t c = 0; c < a.cols(); ++c) row[c] = Rational(a(r, c));
    if (basis.reduce_and_insert(std::move(row))) kept.push_back(r);
  }
  return kept;
}

BigInt determinant(const IntegerMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("determinant of a non-square matrix");
  if (m.rows() == 0) return 1;
  return to_integer(rational_det(to_rational_rows(m)));
}

IntegerMatrix adjugate(const IntegerMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("adjugate of a non-square matrix");
  const std::size_t n = m.rows();
  IntegerMatrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  const BigInt det = determinant(m);
  if (det != 0) {
    // adj = det * M^{-1} via Gauss-Jordan on [M | I].
    std::vector<RationalRow> aug(n, RationalRow(2 * n));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) aug[r][c] = Rational(m(r, c));
      aug[r][n + r] = 1;
    }
    rref(aug);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) adj(r, c) = to_integer(aug[r][n + c] * Rational(det));
    return adj;
  }
  // Singular: cofactor expansion.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<RationalRow> minor;
      minor.reserve(n - 1);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == i) continue;
        RationalRow row;
        row.reserve(n - 1);
        for (std::size_t c = 0; c < n; ++c)
          if (c != j) row.emplace_back(m(r, c));
        minor.push_back(std::move(row));
      }
      BigInt cof = to_integer(rational_det(std::move(minor)));
      adj(j, i) = ((i + j) % 2 == 0) ? cof : BigInt(-cof);
    }
  return adj;
}

bool is_unimodular(const IntegerMatrix& u) {
  if (u.rows() != u.cols()) return false;
  return abs(determinant(u)) == 1;
}

}  // namespace relmod
