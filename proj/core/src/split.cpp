#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "twinforge/dataset.hpp"
#include "twinforge/error.hpp"
#include "twinforge/random.hpp"

namespace twinforge {

void SplitSpec::validate() const {
  for (double f : {train_fraction, val_fraction, test_fraction}) {
    if (!(f > 0.0 && f < 1.0)) {
      throw ConfigError("split fractions must lie in (0, 1)");
    }
  }
  if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
}

SplitSpec SplitSpec::parse_fractions(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError("bad split fraction `" + item + "`");
    }
    parts.push_back(v);
  }
  if (parts.size() != 3) throw ConfigError("split needs three fractions: train,val,test");
  SplitSpec spec;
  spec.train_fraction = parts[0];
  spec.val_fraction = parts[1];
  spec.test_fraction = parts[2];
  spec.validate();
  return spec;
}

std::tuple<std::size_t, std::size_t, std::size_t> split_sizes(std::size_t n, const SplitSpec& spec) {
  if (n < 3) {
    throw DegenerateSplitError("a class cell with " + std::to_string(n) +
                               " samples cannot populate train, validation and test");
  }
  // The epsilon absorbs representation error such as 0.7 * 150 landing just below 105.
  auto floor_of = [n](double f) {
    return static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 1e-9));
  };
  std::size_t train = std::max<std::size_t>(floor_of(spec.train_fraction), 1);
  std::size_t val = std::max<std::size_t>(floor_of(spec.val_fraction), 1);
  while (train + val >= n) {
    if (train >= val && train > 1) {
      --train;
    } else {
      --val;
    }
  }
  return {train, val, n - train - val};
}

SplitResult split(const Dataset& data, const SplitSpec& spec) {
  spec.validate();
  if (spec.stratify_by_source && !data.has_sources()) {
    throw ConfigError("stratify_by_source requested but the dataset has no source column");
  }
  std::map<std::pair<int, std::string>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::string source = spec.stratify_by_source ? data.sources()[i] : std::string();
    cells[{data.label(i), std::move(source)}].push_back(i);
  }

  Rng rng(spec.seed);
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> val_rows;
  std::vector<std::size_t> test_rows;
  for (auto& [key, rows] : cells) {
    const auto [n_train, n_val, n_test] = split_sizes(rows.size(), spec);
    rng.shuffle(std::span<std::size_t>(rows));
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    val_rows.insert(val_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train),
                    rows.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    test_rows.insert(test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), rows.end());
    (void)n_test;
  }
  return {data.subset(train_rows), data.subset(val_rows), data.subset(test_rows)};
}

}  // namespace twinforge
