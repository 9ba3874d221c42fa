// Copyright 2026 The Haarlab Authors
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

#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "haarlab/types.hpp"

namespace haarlab {

// Ordered list of named tensor factors. The first register is the slowest
// index (standard Kronecker convention): a basis state of [A, B] with
// dims [dA, dB] has flat index a * dB + b.
class RegisterLayout {
 public:
  RegisterLayout() = default;
  RegisterLayout(std::initializer_list<std::pair<std::string, Index>> regs);

  void append(const std::string& name, Index dim);

  int num_registers() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_.at(i); }
  Index dim(int i) const { return dims_.at(i); }
  Index dim(const std::string& name) const;
  const std::vector<Index>& dims() const { return dims_; }

  // Position of a register, or -1 when absent.
  int index_of(const std::string& name) const;
  bool has(const std::string& name) const { return index_of(name) >= 0; }

  // Product of all register dimensions.
  Index total_dim() const;

  // Concatenation; duplicate names are rejected.
  RegisterLayout concat(const RegisterLayout& other) const;

  // Copy with one register removed.
  RegisterLayout without(const std::string& name) const;

  bool operator==(const RegisterLayout& other) const {
    return names_ == other.names_ && dims_ == other.dims_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Index> dims_;
};

}  // namespace haarlab
