// Copyright 2026 The Clusterlets Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clusterlets/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "clusterlets/errors.hpp"

namespace clusterlets {
namespace {

using Row = std::vector<std::string>;

// RFC-4180: quoted fields may contain separators, CR/LF and doubled quotes.
std::vector<Row> parse_records(const std::string& text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) i = 3;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty())
          throw ParseError("csv: stray quote inside unquoted field on line " +
                           std::to_string(rows.size() + 1));
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("csv: unterminated quoted field");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  if (*first == '+') ++first;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

std::uint64_t fnv1a(std::uint64_t h, const void* p, std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(p);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= b[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep))
    if (auto t = trim(tok); !t.empty()) out.push_back(std::move(t));
  return out;
}

void validate(const Dataset& ds) {
  const std::size_t n = ds.colors.size();
  if (n < 2) throw ValidationError("dataset needs at least 2 rows");
  if (ds.features.rows() != n)
    throw ValidationError("feature rows do not match color count");
  if (ds.features.cols() < 1)
    throw ValidationError("dataset needs at least 1 feature column");
  if (ds.color_names.size() < 2)
    throw ValidationError("fair clustering needs at least 2 distinct colors, got " +
                          std::to_string(ds.color_names.size()));
  if (ds.color_counts.size() != ds.color_names.size())
    throw ValidationError("color histogram size mismatch");
  std::size_t total = 0;
  for (std::size_t k = 0; k < ds.color_counts.size(); ++k) {
    if (ds.color_counts[k] == 0)
      throw ValidationError("color '" + ds.color_names[k] + "' has no instances");
    total += ds.color_counts[k];
  }
  if (total != n) throw ValidationError("color histogram does not sum to N");
}

Dataset make_dataset(Matrix features, std::vector<ColorId> colors,
                     std::vector<std::string> color_names,
                     std::vector<std::string> feature_names) {
  Dataset ds;
  ds.color_counts.assign(color_names.size(), 0);
  for (ColorId c : colors) {
    if (c < 0 || static_cast<std::size_t>(c) >= color_names.size())
      throw ValidationError("color id out of range");
    ++ds.color_counts[static_cast<std::size_t>(c)];
  }
  if (feature_names.empty())
    for (std::size_t j = 0; j < features.cols(); ++j)
      feature_names.push_back("x" + std::to_string(j));
  ds.features = std::move(features);
  ds.colors = std::move(colors);
  ds.color_names = std::move(color_names);
  ds.feature_names = std::move(feature_names);
  validate(ds);
  return ds;
}

Dataset parse_csv(const std::string& text, const CsvOptions& opts) {
  auto records = parse_records(text);
  if (records.empty()) throw ParseError("csv: missing header row");
  Row header = records.front();
  for (auto& h : header) h = trim(h);
  const std::size_t ncols = header.size();

  auto column_of = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ConfigError("column '" + name + "' not found in csv header");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t color_col = column_of(opts.color_column);

  for (std::size_t r = 1; r < records.size(); ++r)
    if (records[r].size() != ncols)
      throw ParseError("csv: row " + std::to_string(r) + " has " +
                       std::to_string(records[r].size()) + " fields, expected " +
                       std::to_string(ncols));

  std::vector<std::size_t> feature_cols;
  if (!opts.feature_columns.empty()) {
    for (const auto& f : opts.feature_columns) {
      const std::size_t c = column_of(f);
      if (c == color_col)
        throw ConfigError("color column '" + f + "' cannot also be a feature");
      feature_cols.push_back(c);
    }
  } else {
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c == color_col) continue;
      // Text columns (first cell non-numeric and non-blank) are not features.
      if (records.size() > 1) {
        const std::string first = trim(records[1][c]);
        if (!first.empty() && !parse_double(first)) continue;
      }
      feature_cols.push_back(c);
    }
  }
  if (feature_cols.empty()) throw ConfigError("csv: no numeric feature columns");

  const std::size_t n = records.size() - 1;
  Matrix features(n, feature_cols.size());
  std::vector<ColorId> colors(n);
  std::vector<std::string> names;
  std::unordered_map<std::string, ColorId> ids;
  for (std::size_t r = 0; r < n; ++r) {
    const Row& rec = records[r + 1];
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      const auto v = parse_double(rec[feature_cols[j]]);
      if (!v)
        throw ParseError("csv: row " + std::to_string(r + 1) + ", column '" +
                         header[feature_cols[j]] + "': cannot parse '" +
                         rec[feature_cols[j]] + "' as a number");
      features(r, j) = *v;
    }
    const std::string color = trim(rec[color_col]);
    if (color.empty())
      throw ParseError("csv: row " + std::to_string(r + 1) + ", column '" +
                       opts.color_column + "': missing color");
    auto [it, inserted] = ids.emplace(color, static_cast<ColorId>(names.size()));
    if (inserted) names.push_back(color);
    colors[r] = it->second;
  }

  if (!opts.color_order.empty()) {
    if (opts.color_order.size() != names.size())
      throw ConfigError("color order lists " +
                        std::to_string(opts.color_order.size()) +
                        " colors but the data has " + std::to_string(names.size()));
    std::vector<ColorId> remap(names.size(), -1);
    for (std::size_t i = 0; i < opts.color_order.size(); ++i) {
      auto it = ids.find(opts.color_order[i]);
      if (it == ids.end() || remap[static_cast<std::size_t>(it->second)] != -1)
        throw ConfigError("color order entry '" + opts.color_order[i] +
                          "' is unknown or repeated");
      remap[static_cast<std::size_t>(it->second)] = static_cast<ColorId>(i);
    }
    for (auto& c : colors) c = remap[static_cast<std::size_t>(c)];
    names = opts.color_order;
  }

  std::vector<std::string> fnames;
  for (auto c : feature_cols) fnames.push_back(header[c]);
  return make_dataset(std::move(features), std::move(colors), std::move(names),
                      std::move(fnames));
}

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), opts);
}

Dataset standardize(const Dataset& ds) {
  Dataset out = ds;
  const std::size_t n = ds.size();
  for (std::size_t j = 0; j < ds.dims(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += ds.features(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = ds.features(i, j) - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    // Relative threshold so that already-constant columns with rounding noise
    // still collapse to zero.
    const bool constant = !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
    for (std::size_t i = 0; i < n; ++i)
      out.features(i, j) = constant ? 0.0 : (ds.features(i, j) - mean) / sd;
  }
  return out;
}

ColorPartition partition_by_color(const Dataset& ds) {
  ColorPartition part(ds.n_colors());
  for (std::size_t k = 0; k < part.size(); ++k) part[k].reserve(ds.color_counts[k]);
  for (std::size_t i = 0; i < ds.size(); ++i)
    part[static_cast<std::size_t>(ds.colors[i])].push_back(i);
  return part;
}

Fingerprint fingerprint(const Dataset& ds) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& f : ds.feature_names) h = fnv1a(h, f.data(), f.size() + 1);
  for (const auto& c : ds.color_names) h = fnv1a(h, c.data(), c.size() + 1);
  for (ColorId c : ds.colors) h = fnv1a(h, &c, sizeof c);
  for (double v : ds.features.data()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    h = fnv1a(h, &bits, sizeof bits);
  }
  return {ds.size(), h};
}

}  // namespace clusterlets
