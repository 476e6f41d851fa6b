#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ipcheck {

using BigInt = boost::multiprecision::cpp_int;

/// Exact Stirling numbers of the second kind and Bell numbers.
///
/// Rows S(n, 0..n) come from S(n,k) = S(n-1,k-1) + k*S(n-1,k). Rows up to
/// `full_rows` are kept; past that only every `stride`-th row is cached and
/// the rows in between are recomputed on demand, which keeps the memory of
/// n ~ 1000 tables in the tens of megabytes.
class BigCountTable {
 public:
  explicit BigCountTable(std::size_t full_rows = 256, std::size_t stride = 32)
      : full_rows_(full_rows), stride_(stride ? stride : 1) {
    rows_.push_back({BigInt(1)});
  }

  /// S(n, k) for 0 <= k <= n.
  BigInt stirling2(std::size_t n, std::size_t k) const {
    if (k > n) return 0;
    return row(n)[k];
  }

  BigInt bell(std::size_t n) const {
    BigInt sum = 0;
    for (const auto& v : row(n)) sum += v;
    return sum;
  }

  /// Row n. Returned by value past the full-storage range.
  std::vector<BigInt> row(std::size_t n) const {
    std::lock_guard<std::mutex> lock(mu_);
    while (rows_.size() <= std::min(n, full_rows_)) rows_.push_back(next_row(rows_.back()));
    if (n < rows_.size()) return rows_[n];
    // checkpoint at or below n
    std::size_t base = rows_.size() - 1;
    const std::vector<BigInt>* start = &rows_.back();
    auto it = checkpoints_.upper_bound(n);
    if (it != checkpoints_.begin()) {
      --it;
      if (it->first > base) {
        base = it->first;
        start = &it->second;
      }
    }
    std::vector<BigInt> cur = *start;
    for (std::size_t r = base + 1; r <= n; ++r) {
      cur = next_row(cur);
      if (r % stride_ == 0 && !checkpoints_.count(r)) checkpoints_.emplace(r, cur);
    }
    return cur;
  }

  /// Stored row for n below the full-storage limit, else nullptr. The
  /// reference stays valid for the lifetime of the table.
  const std::vector<BigInt>* stored_row(std::size_t n) const {
    if (n > full_rows_) return nullptr;
    std::lock_guard<std::mutex> lock(mu_);
    while (rows_.size() <= n) rows_.push_back(next_row(rows_.back()));
    return &rows_[n];
  }

  std::size_t full_rows() const { return full_rows_; }

  /// Rows lo..hi inclusive, computed in one pass.
  std::vector<std::vector<BigInt>> rows(std::size_t lo, std::size_t hi) const {
    std::vector<std::vector<BigInt>> out;
    if (hi < lo) return out;
    out.reserve(hi - lo + 1);
    std::vector<BigInt> cur = row(lo);
    out.push_back(cur);
    for (std::size_t r = lo + 1; r <= hi; ++r) {
      cur = next_row(cur);
      out.push_back(cur);
    }
    return out;
  }

  static std::vector<BigInt> next_row(const std::vector<BigInt>& prev) {
    const std::size_t n = prev.size();  // new row index
    std::vector<BigInt> next(n + 1);
    next[0] = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      BigInt v = prev[k - 1];
      if (k < n) v += prev[k] * k;
      next[k] = std::move(v);
    }
    return next;
  }

 private:
  std::size_t full_rows_;
  std::size_t stride_;
  mutable std::mutex mu_;
  mutable std::deque<std::vector<BigInt>> rows_;
  mutable std::map<std::size_t, std::vector<BigInt>> checkpoints_;
};

inline const BigCountTable& shared_count_table() {
  static const BigCountTable table;
  return table;
}

}  // namespace ipcheck
