#include "cardsketch/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "cardsketch/error.hpp"

namespace cardsketch {

const char* to_string(BaselineKind kind) noexcept {
  switch (kind) {
    case BaselineKind::LogLog: return "loglog";
    case BaselineKind::HyperLogLog: return "hll";
    case BaselineKind::MinCount: return "mincount";
  }
  return "unknown";
}

double baseline_are(BaselineKind kind) noexcept {
  switch (kind) {
    case BaselineKind::LogLog: return 0.592;
    case BaselineKind::HyperLogLog: return 0.925;
    case BaselineKind::MinCount: return 1.0;
  }
  return 1.0;
}

double loglog_alpha(std::uint32_t m) {
  if (m < 1) fail(ErrorKind::Domain, "m must be >= 1");
  const double inv = 1.0 / m;
  const double base = std::tgamma(-inv) * -std::expm1(inv * std::numbers::ln2) /
                      std::numbers::ln2;
  return std::pow(base, -static_cast<double>(m));
}

double hyperloglog_alpha(std::uint32_t m) {
  switch (m) {
    case 16: return 0.673;
    case 32: return 0.697;
    case 64: return 0.709;
    default: return 0.7213 / (1.0 + 1.079 / m);
  }
}

RegisterSketch::RegisterSketch(BaselineKind kind, std::uint32_t m,
                               std::uint64_t salt)
    : kind_(kind), m_(m), bucket_bits_(0), salt_(salt) {
  if (m < 1 || m > (1u << 16) || !std::has_single_bit(m)) {
    fail(ErrorKind::Domain, "register count must be a power of two in [1, 65536]");
  }
  bucket_bits_ = static_cast<std::uint32_t>(std::countr_zero(m));
  if (kind_ == BaselineKind::MinCount) {
    minima_.assign(static_cast<std::size_t>(m) * kMinCountOrder, 0.0);
    filled_.assign(m, 0);
  } else {
    ranks_.assign(m, 0);
  }
}

RegisterSketch RegisterSketch::from_ranks(BaselineKind kind, std::uint64_t salt,
                                          std::vector<std::uint8_t> ranks) {
  if (kind == BaselineKind::MinCount) {
    fail(ErrorKind::Format, "MinCount state is a list of minima, not ranks");
  }
  RegisterSketch s(kind, static_cast<std::uint32_t>(ranks.size()), salt);
  const auto max_rank = 64 - s.bucket_bits_ + 1;
  for (auto r : ranks) {
    if (r > max_rank) fail(ErrorKind::Format, "rank register out of range");
  }
  s.ranks_ = std::move(ranks);
  return s;
}

RegisterSketch RegisterSketch::from_minima(
    std::uint64_t salt, const std::vector<std::vector<double>>& minima) {
  RegisterSketch s(BaselineKind::MinCount, static_cast<std::uint32_t>(minima.size()),
                   salt);
  for (std::uint32_t b = 0; b < s.m_; ++b) {
    const auto& list = minima[b];
    if (list.size() > kMinCountOrder) fail(ErrorKind::Format, "too many minima");
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!(list[i] > 0.0 && list[i] < 1.0) || (i > 0 && !(list[i] > list[i - 1]))) {
        fail(ErrorKind::Format, "minima must be strictly ascending in (0,1)");
      }
      s.minima_[static_cast<std::size_t>(b) * kMinCountOrder + i] = list[i];
    }
    s.filled_[b] = static_cast<std::uint8_t>(list.size());
  }
  return s;
}

std::span<const double> RegisterSketch::minima(std::uint32_t b) const {
  if (kind_ != BaselineKind::MinCount) return {};
  if (b >= m_) fail(ErrorKind::IndexOutOfRange, "bucket index out of range");
  return {minima_.data() + static_cast<std::size_t>(b) * kMinCountOrder, filled_[b]};
}

void RegisterSketch::offer_minimum(std::uint32_t b, double u) {
  double* row = minima_.data() + static_cast<std::size_t>(b) * kMinCountOrder;
  std::uint8_t& cnt = filled_[b];
  if (cnt == kMinCountOrder && u >= row[kMinCountOrder - 1]) return;
  std::uint32_t pos = 0;
  while (pos < cnt && row[pos] < u) ++pos;
  if (pos < cnt && row[pos] == u) return;
  const std::uint32_t last = cnt < kMinCountOrder ? cnt : kMinCountOrder - 1;
  for (std::uint32_t i = last; i > pos; --i) row[i] = row[i - 1];
  row[pos] = u;
  if (cnt < kMinCountOrder) ++cnt;
}

void RegisterSketch::offer(std::uint64_t hash) {
  const std::uint32_t b =
      bucket_bits_ == 0 ? 0 : static_cast<std::uint32_t>(hash >> (64 - bucket_bits_));
  const std::uint64_t rest = hash << bucket_bits_;
  if (kind_ == BaselineKind::MinCount) {
    offer_minimum(b, hashing::uniform_from_bits(rest));
    return;
  }
  const auto width = 64 - bucket_bits_;
  const auto rank = static_cast<std::uint8_t>(
      rest == 0 ? width + 1 : std::countl_zero(rest) + 1);
  ranks_[b] = std::max(ranks_[b], rank);
}

void RegisterSketch::update(std::string_view item, std::int64_t d) {
  if (d <= 0) {
    fail(ErrorKind::UnsupportedDeletion,
         "register sketches accept only positive quantities (d=" +
             std::to_string(d) + ")");
  }
  offer(hashing::item_hash64(hashing::item_digest(item, salt_)));
}

void RegisterSketch::update(const VariateRow& row, std::int64_t d) {
  if (d <= 0) {
    fail(ErrorKind::UnsupportedDeletion,
         "register sketches accept only positive quantities (d=" +
             std::to_string(d) + ")");
  }
  if (row.salt() != salt_) {
    fail(ErrorKind::IncompatibleSketch, "variate row was hashed with a different salt");
  }
  offer(hashing::item_hash64(row.digest()));
}

void RegisterSketch::merge(const RegisterSketch& other) {
  if (kind_ != other.kind_ || m_ != other.m_ || salt_ != other.salt_) {
    fail(ErrorKind::IncompatibleSketch,
         "cannot merge register sketches with different kind, m or salt");
  }
  if (kind_ == BaselineKind::MinCount) {
    for (std::uint32_t b = 0; b < m_; ++b) {
      for (double u : other.minima(b)) offer_minimum(b, u);
    }
    return;
  }
  for (std::uint32_t b = 0; b < m_; ++b) ranks_[b] = std::max(ranks_[b], other.ranks_[b]);
}

Estimate RegisterSketch::estimate(double level) const {
  check_level(level);
  const double m = m_;
  double c_hat = 0.0;
  EstimatorId id = EstimatorId::LogLog;
  switch (kind_) {
    case BaselineKind::LogLog: {
      if (std::all_of(ranks_.begin(), ranks_.end(), [](auto r) { return r == 0; })) {
        fail(ErrorKind::EmptySketch, "all registers are empty");
      }
      double sum = 0.0;
      for (auto r : ranks_) sum += r;
      c_hat = loglog_alpha(m_) * m * std::exp2(sum / m);
      break;
    }
    case BaselineKind::HyperLogLog: {
      id = EstimatorId::HyperLogLog;
      double harmonic = 0.0;
      std::uint32_t zeros = 0;
      for (auto r : ranks_) {
        harmonic += std::exp2(-static_cast<double>(r));
        if (r == 0) ++zeros;
      }
      if (zeros == m_) fail(ErrorKind::EmptySketch, "all registers are empty");
      c_hat = hyperloglog_alpha(m_) * m * m / harmonic;
      // Small-range correction (linear counting). No large-range correction:
      // the hash is 64 bits wide.
      if (c_hat <= 2.5 * m && zeros > 0) c_hat = m * std::log(m / zeros);
      break;
    }
    case BaselineKind::MinCount: {
      id = EstimatorId::MinCount;
      if (std::all_of(filled_.begin(), filled_.end(), [](auto f) { return f == 0; })) {
        fail(ErrorKind::EmptySketch, "all buckets are empty");
      }
      // Bucket estimate (k - 1) / U_(k) from the k-th smallest uniform; a bucket
      // that never filled holds its exact distinct count.
      for (std::uint32_t b = 0; b < m_; ++b) {
        const auto f = filled_[b];
        if (f < kMinCountOrder) {
          c_hat += f;
        } else {
          c_hat += (kMinCountOrder - 1.0) /
                   minima_[static_cast<std::size_t>(b) * kMinCountOrder +
                           kMinCountOrder - 1];
        }
      }
      break;
    }
  }
  return lognormal_interval(c_hat, baseline_are(kind_) * m, level, id, m_);
}

}  // namespace cardsketch
