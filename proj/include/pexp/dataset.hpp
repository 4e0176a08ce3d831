#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pexp/core.hpp"

namespace pexp {

// Positive observations with provenance.
class Dataset {
 public:
  Dataset(std::vector<double> values, std::string label = "", std::string source = "")
      : values_(std::move(values)), label_(std::move(label)), source_(std::move(source)) {
    if (values_.empty()) throw DomainError("dataset '" + label_ + "' is empty");
    for (double v : values_) {
      if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("dataset '" + label_ + "' holds a non-positive value " + detail::fmt(v));
    }
  }

  const std::vector<double>& values() const noexcept { return values_; }
  const std::string& label() const noexcept { return label_; }
  const std::string& source() const noexcept { return source_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::vector<double> sorted() const {
    std::vector<double> s = values_;
    std::sort(s.begin(), s.end());
    return s;
  }

  double mean() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
  }

  Dataset scaled(double c) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= c;
    return Dataset(std::move(v), label_, source_);
  }

 private:
  std::vector<double> values_;
  std::string label_;
  std::string source_;
};

// One value per line (a trailing comma-separated field list also works);
// '#' starts a comment; a single non-numeric header line is skipped.
inline Dataset load_dataset_csv(const std::string& path, std::string label = "") {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open dataset file '" + path + "'");
  if (label.empty()) label = path;
  std::vector<double> values;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string tok;
    bool any_number = false, any_text = false;
    std::vector<double> row;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        row.push_back(v);
        any_number = true;
      } catch (const std::exception&) {
        any_text = true;
      }
    }
    if (any_text) {
      if (header_seen || !values.empty() || any_number)
        throw DomainError(path + ":" + std::to_string(lineno) + ": unparseable value");
      header_seen = true;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  return Dataset(std::move(values), std::move(label), path);
}

}  // namespace pexp
