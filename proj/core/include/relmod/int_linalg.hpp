#pragma once

// Exact integer and rational linear algebra. Nothing in here touches floating
// point; results are exact for arbitrarily large entries.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace relmod {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Dense row-major matrix of arbitrary-precision integers.
class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(std::size_t rows, std::size_t cols);
  IntegerMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);

  static IntegerMatrix identity(std::size_t n);
  static IntegerMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  BigInt& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const BigInt& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::vector<BigInt> row(std::size_t r) const;
  std::vector<BigInt> col(std::size_t c) const;

  IntegerMatrix transpose() const;
  /// Rows `first .. first+count-1`.
  IntegerMatrix row_block(std::size_t first, std::size_t count) const;
  /// This matrix with `other` appended underneath.
  IntegerMatrix stacked(const IntegerMatrix& other) const;

  bool is_zero() const;
  /// Entry as int64; throws InputError if it does not fit.
  std::int64_t as_int64(std::size_t r, std::size_t c) const;
  /// Row-major copy converted to double.
  std::vector<double> to_double() const;

  friend IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b);
  friend bool operator==(const IntegerMatrix& a, const IntegerMatrix& b) = default;

  std::string to_string() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> data_;
};

/// Column-style Hermite normal form: A * U = H with U unimodular.
///
/// H has the shape [B, 0]: the first `rank` columns carry the pivots (one per
/// independent row of A, positive, with the entries to their left reduced
/// into [0, pivot)), and every column from `rank` on is zero.
struct HnfResult {
  IntegerMatrix H;
  IntegerMatrix U;
  std::size_t rank = 0;
  /// Row index of A holding the pivot of each of the first `rank` columns.
  std::vector<std::size_t> pivot_rows;
};

/// Pivoting is deterministic: within a row, the pivot is the column with the
/// smallest nonzero absolute value, ties broken by lowest index.
HnfResult hermite_normal_form(const IntegerMatrix& a);

/// Integer matrix D whose rows span Ker(A) over the rationals.
struct KernelBasis {
  IntegerMatrix D;
  std::size_t size() const noexcept { return D.rows(); }
};

/// D = (U Z)^T where Z selects the trailing cols(A) - rank(A) columns of the
/// Hermite transform. Throws InputError("model is saturated") when the kernel
/// is trivial.
KernelBasis integer_kernel_basis(const IntegerMatrix& a);

/// Rewrites the rows of `basis` into reduced echelon form over the rationals
/// and scales every row to a primitive integer vector with a positive leading
/// entry. The rational row space is unchanged; the result is canonical for
/// that space.
IntegerMatrix canonical_integer_basis(const IntegerMatrix& basis);

std::size_t rational_rank(const IntegerMatrix& a);

/// True iff v is a rational combination of the rows of A.
bool row_space_contains(const IntegerMatrix& a, std::span<const Rational> v);
bool row_space_contains(const IntegerMatrix& a, std::span<const std::int64_t> v);

/// Indices of rows kept by a greedy top-down scan that keeps a row iff it
/// increases the rank of the rows kept so far.
std::vector<std::size_t> independent_rows(const IntegerMatrix& a);

BigInt determinant(const IntegerMatrix& m);

/// Classical adjugate: adj(M) * M = det(M) * I.
IntegerMatrix adjugate(const IntegerMatrix& m);

/// |det U| == 1.
bool is_unimodular(const IntegerMatrix& u);

}  // namespace relmod
