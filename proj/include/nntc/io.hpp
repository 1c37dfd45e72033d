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

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nntc/model.hpp"
#include "nntc/observations.hpp"

namespace nntc {

/// Parse failure with the 1-based line number where it happened.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

/// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

// Observation files: line 1 is "p r_1 ... r_p", then one line per sample,
// "x_1 ... x_p y" with one-based indices. Writers produce canonical
// single-space separated lines so write -> read -> write is byte-identical.
ObservationSet read_observations(std::istream& in);
ObservationSet read_observations_file(const std::string& path);
void write_observations(std::ostream& out, const ObservationSet& obs);

/// Dense tensors use the observation format with every index enumerated once
/// in row-major order.
void write_dense_as_observations(std::ostream& out, const Shape& shape,
                                 std::span<const double> dense);

/// Reads an observation-format file that enumerates every index exactly once
/// and returns the dense tensor. Throws ParseError when coverage is partial
/// or duplicated.
std::vector<double> read_dense_observations(std::istream& in, Shape* shape_out);

// Model files: line 1 is "lambda m p r_1 ... r_p", then one line per atom,
// "w b_1 ... b_p" where b_k is the mode-k indicator as a 0/1 string of
// length r_k. Weights must form a simplex within 1e-9 on load and are
// renormalized exactly.
Model read_model(std::istream& in);
Model read_model_file(const std::string& path);
void write_model(std::ostream& out, const Model& model);

}  // namespace nntc
