#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "diagalign/errors.hpp"

namespace diagalign {

inline constexpr std::size_t kHistogramBins = 20;

// Fixed-bin histogram over [0, 1]; the final bin is closed at 1.0.
inline std::array<std::size_t, kHistogramBins> histogram_unit(const std::vector<double>& values) {
  std::array<std::size_t, kHistogramBins> bins{};
  for (double v : values) {
    auto idx = static_cast<std::size_t>(v * kHistogramBins);
    if (idx >= kHistogramBins) idx = kHistogramBins - 1;
    ++bins[idx];
  }
  return bins;
}

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;   // square, symmetric, unit diagonal
  std::vector<bool> zero_variance;           // per column; such columns correlate as 0
};

// Pearson correlation of every column pair. Columns must be equal-length
// with at least 2 rows. Zero-variance columns yield 0 off-diagonal (flagged)
// rather than NaN.
inline CorrelationMatrix correlation_matrix(const std::vector<std::vector<double>>& columns,
                                            std::vector<std::string> names) {
  if (columns.empty() || columns[0].size() < 2)
    throw InputError("correlation requires at least 2 rows");
  std::size_t rows = columns[0].size();
  for (const auto& col : columns)
    if (col.size() != rows) throw InputError("correlation columns have unequal lengths");

  std::size_t n = columns.size();
  std::vector<double> mean(n, 0.0), sd(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    for (double v : columns[c]) mean[c] += v;
    mean[c] /= static_cast<double>(rows);
    for (double v : columns[c]) sd[c] += (v - mean[c]) * (v - mean[c]);
    sd[c] = std::sqrt(sd[c]);
  }

  CorrelationMatrix out;
  out.names = std::move(names);
  out.zero_variance.resize(n);
  out.values.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < n; ++c) out.zero_variance[c] = sd[c] == 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    out.values[a][a] = 1.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      double r = 0.0;
      if (sd[a] != 0.0 && sd[b] != 0.0) {
        double cov = 0.0;
        for (std::size_t i = 0; i < rows; ++i)
          cov += (columns[a][i] - mean[a]) * (columns[b][i] - mean[b]);
        r = cov / (sd[a] * sd[b]);
      }
      out.values[a][b] = out.values[b][a] = r;
    }
  }
  return out;
}

}  // namespace diagalign
