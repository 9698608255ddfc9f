// Copyright 2026 The AIM Simulator Authors
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

#include <stdexcept>
#include <string>

namespace aim
{

/// Bad or inconsistent configuration (unknown lane, invalid parameter, ...).
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition.
class ContractViolation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Webster timing requested with a total flow ratio >= 1.
class OversaturationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Combined optimization refused because the batch exceeds max_batch.
class BatchTooLarge : public std::runtime_error
{
public:
  BatchTooLarge(std::size_t size, std::size_t limit)
  : std::runtime_error(
      "coordination batch of " + std::to_string(size) + " vehicles exceeds max_batch " +
      std::to_string(limit)),
    size_(size),
    limit_(limit)
  {
  }
  std::size_t size() const { return size_; }
  std::size_t limit() const { return limit_; }

private:
  std::size_t size_;
  std::size_t limit_;
};

/// Post-hoc safety sweep found a violation. Indicates a bug.
class SafetyViolation : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace aim
