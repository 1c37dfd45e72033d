// Copyright 2026 The nntc Authors
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

#include "nntc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nntc {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& tok, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected an integer, got '" + tok + "'");
  }
  return v;
}

double parse_double(const std::string& tok, int line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty()) {
    throw ParseError(line, "expected a number, got '" + tok + "'");
  }
  return v;
}

struct ObservationLines {
  Shape shape;
  std::vector<Index> indices;
  std::vector<double> values;
};

ObservationLines read_observation_lines(std::istream& in) {
  std::string line;
  int lineno = 0;
  // header
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    header = split_ws(line);
    if (!header.empty()) break;
  }
  if (header.empty()) throw ParseError(lineno == 0 ? 1 : lineno, "missing header line");
  const int p = parse_int(header[0], lineno);
  if (p < 2) throw ParseError(lineno, "tensor order must be at least 2");
  if (static_cast<int>(header.size()) != p + 1) {
    throw ParseError(lineno, "header must list exactly " + std::to_string(p) + " dimensions");
  }
  std::vector<int> dims;
  for (int k = 1; k <= p; ++k) {
    const int r = parse_int(header[static_cast<std::size_t>(k)], lineno);
    if (r < 1) throw ParseError(lineno, "mode dimensions must be positive");
    dims.push_back(r);
  }
  Shape shape(dims);

  ObservationLines out{std::move(shape), {}, {}};
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (static_cast<int>(toks.size()) != p + 1) {
      throw ParseError(lineno, "sample line needs " + std::to_string(p) + " indices and a value");
    }
    Index x;
    x.coords.reserve(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) {
      const int one_based = parse_int(toks[static_cast<std::size_t>(k)], lineno);
      const int zero_based = one_based - 1;
      if (zero_based < 0 || zero_based >= out.shape.dim(k)) {
        throw ParseError(lineno, "index " + std::to_string(one_based) + " out of range for mode " +
                                     std::to_string(k + 1));
      }
      x.coords.push_back(zero_based);
    }
    const double y = parse_double(toks[static_cast<std::size_t>(p)], lineno);
    if (!(y >= 0.0)) throw ParseError(lineno, "observed values must be nonnegative");
    out.indices.push_back(std::move(x));
    out.values.push_back(y);
  }
  if (out.indices.empty()) throw ParseError(lineno + 1, "no sample lines");
  return out;
}

}  // namespace

ObservationSet read_observations(std::istream& in) {
  ObservationLines lines = read_observation_lines(in);
  return ObservationSet(lines.shape, lines.indices, lines.values);
}

ObservationSet read_observations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_observations(in);
}

void write_observations(std::ostream& out, const ObservationSet& obs) {
  const int p = obs.shape().order();
  out << p;
  for (int k = 0; k < p; ++k) out << ' ' << obs.shape().dim(k);
  out << '\n';
  for (std::int64_t i = 0; i < obs.num_samples(); ++i) {
    auto coords = obs.sample_coords(i);
    for (int k = 0; k < p; ++k) out << coords[k] + 1 << ' ';
    out << format_double(obs.value(i)) << '\n';
  }
}

void write_dense_as_observations(std::ostream& out, const Shape& shape,
                                 std::span<const double> dense) {
  const int p = shape.order();
  out << p;
  for (int k = 0; k < p; ++k) out << ' ' << shape.dim(k);
  out << '\n';
  std::vector<int> coords(static_cast<std::size_t>(p));
  for (std::int64_t lin = 0; lin < shape.pi(); ++lin) {
    shape.decode(lin, coords);
    for (int k = 0; k < p; ++k) out << coords[static_cast<std::size_t>(k)] + 1 << ' ';
    out << format_double(dense[static_cast<std::size_t>(lin)]) << '\n';
  }
}

std::vector<double> read_dense_observations(std::istream& in, Shape* shape_out) {
  ObservationLines lines = read_observation_lines(in);
  const std::int64_t pi = lines.shape.pi();
  std::vector<double> dense(static_cast<std::size_t>(pi), 0.0);
  std::vector<char> seen(static_cast<std::size_t>(pi), 0);
  for (std::size_t i = 0; i < lines.indices.size(); ++i) {
    const std::int64_t lin = lines.shape.linear_index(lines.indices[i].coords);
    if (seen[static_cast<std::size_t>(lin)]) {
      throw ParseError(static_cast<int>(i) + 2, "duplicate index in dense tensor file");
    }
    seen[static_cast<std::size_t>(lin)] = 1;
    dense[static_cast<std::size_t>(lin)] = lines.values[i];
  }
  for (std::int64_t lin = 0; lin < pi; ++lin) {
    if (!seen[static_cast<std::size_t>(lin)]) {
      throw ParseError(1, "dense tensor file does not enumerate every index");
    }
  }
  if (shape_out) *shape_out = lines.shape;
  return dense;
}

Model read_model(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    header = split_ws(line);
    if (!header.empty()) break;
  }
  if (header.empty()) throw ParseError(lineno == 0 ? 1 : lineno, "missing header line");
  if (header.size() < 3) throw ParseError(lineno, "model header needs lambda, atom count, order");
  const double lambda = parse_double(header[0], lineno);
  if (!(lambda >= 0.0)) throw ParseError(lineno, "lambda must be nonnegative");
  const int m = parse_int(header[1], lineno);
  if (m < 1) throw ParseError(lineno, "model needs at least one atom");
  const int p = parse_int(header[2], lineno);
  if (p < 2) throw ParseError(lineno, "tensor order must be at least 2");
  if (static_cast<int>(header.size()) != 3 + p) {
    throw ParseError(lineno, "model header must list exactly " + std::to_string(p) + " dimensions");
  }
  std::vector<int> dims;
  for (int k = 0; k < p; ++k) {
    const int r = parse_int(header[static_cast<std::size_t>(3 + k)], lineno);
    if (r < 1) throw ParseError(lineno, "mode dimensions must be positive");
    dims.push_back(r);
  }
  Shape shape(dims);

  std::vector<Atom> atoms;
  std::vector<double> weights;
  while (static_cast<int>(atoms.size()) < m) {
    if (!std::getline(in, line)) {
      throw ParseError(lineno + 1, "expected " + std::to_string(m) + " atom lines");
    }
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (static_cast<int>(toks.size()) != p + 1) {
      throw ParseError(lineno, "atom line needs a weight and " + std::to_string(p) + " bitstrings");
    }
    const double w = parse_double(toks[0], lineno);
    if (!(w >= 0.0)) throw ParseError(lineno, "weights must be nonnegative");
    Atom a;
    a.lambda = lambda;
    a.theta = zero_theta(shape);
    for (int k = 0; k < p; ++k) {
      const std::string& bits = toks[static_cast<std::size_t>(k + 1)];
      if (static_cast<int>(bits.size()) != shape.dim(k)) {
        throw ParseError(lineno, "mode " + std::to_string(k + 1) + " bitstring must have length " +
                                     std::to_string(shape.dim(k)));
      }
      for (int i = 0; i < shape.dim(k); ++i) {
        const char ch = bits[static_cast<std::size_t>(i)];
        if (ch != '0' && ch != '1') throw ParseError(lineno, "bitstrings may contain only 0 and 1");
        a.theta[static_cast<std::size_t>(k)].set(i, ch == '1');
      }
    }
    atoms.push_back(std::move(a));
    weights.push_back(w);
  }
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (std::abs(wsum - 1.0) > 1e-9) {
    throw ParseError(lineno, "atom weights must sum to 1 within 1e-9");
  }
  for (double& w : weights) w /= wsum;
  return Model(std::move(shape), lambda, std::move(atoms), std::move(weights));
}

Model read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_model(in);
}

void write_model(std::ostream& out, const Model& model) {
  const Shape& shape = model.shape();
  const int p = shape.order();
  out << format_double(model.lambda()) << ' ' << model.size() << ' ' << p;
  for (int k = 0; k < p; ++k) out << ' ' << shape.dim(k);
  out << '\n';
  for (std::size_t j = 0; j < model.size(); ++j) {
    out << format_double(model.weights()[j]);
    for (int k = 0; k < p; ++k) {
      out << ' ';
      const BitVec& bits = model.atoms()[j].theta[static_cast<std::size_t>(k)];
      for (int i = 0; i < shape.dim(k); ++i) out << (bits.get(i) ? '1' : '0');
    }
    out << '\n';
  }
}

}  // namespace nntc
