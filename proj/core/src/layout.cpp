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

#include "haarlab/layout.hpp"

namespace haarlab {

RegisterLayout::RegisterLayout(std::initializer_list<std::pair<std::string, Index>> regs) {
  for (const auto& [name, dim] : regs) append(name, dim);
}

void RegisterLayout::append(const std::string& name, Index dim) {
  require(!name.empty(), "RegisterLayout: register name must be non-empty");
  require(dim >= 1, "RegisterLayout: register dimension must be >= 1");
  require(index_of(name) < 0, "RegisterLayout: duplicate register name '" + name + "'");
  names_.push_back(name);
  dims_.push_back(dim);
}

Index RegisterLayout::dim(const std::string& name) const {
  const int i = index_of(name);
  require(i >= 0, "RegisterLayout: no register named '" + name + "'");
  return dims_[static_cast<std::size_t>(i)];
}

int RegisterLayout::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Index RegisterLayout::total_dim() const {
  Index d = 1;
  for (Index di : dims_) d *= di;
  return d;
}

RegisterLayout RegisterLayout::concat(const RegisterLayout& other) const {
  RegisterLayout out = *this;
  for (int i = 0; i < other.num_registers(); ++i) out.append(other.name(i), other.dim(i));
  return out;
}

RegisterLayout RegisterLayout::without(const std::string& name) const {
  const int drop = index_of(name);
  require(drop >= 0, "RegisterLayout: no register named '" + name + "'");
  RegisterLayout out;
  for (int i = 0; i < num_registers(); ++i) {
    if (i != drop) out.append(names_[static_cast<std::size_t>(i)], dims_[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace haarlab
