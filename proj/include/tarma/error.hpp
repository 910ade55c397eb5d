// Copyright 2026 The tarmagarch Authors
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

#ifndef TARMA__ERROR_HPP_
#define TARMA__ERROR_HPP_

#include <stdexcept>
#include <string>

namespace tarma
{

/// Bad or unusable input data (unreadable file, non-numeric cell, constant series, ...).
class DataError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: divergence, singular matrices, non-finite recursions.
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A simulated path exceeded the overflow guard.
class DivergenceError : public NumericError
{
public:
  using NumericError::NumericError;
};

/// Information matrix too ill-conditioned to form an LM statistic.
class DegenerateError : public NumericError
{
public:
  DegenerateError(const std::string & what, double condition_number)
  : NumericError(what), condition_number_(condition_number) {}

  double condition_number() const noexcept {return condition_number_;}

private:
  double condition_number_;
};

}  // namespace tarma

#endif  // TARMA__ERROR_HPP_
