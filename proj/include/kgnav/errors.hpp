// Copyright 2026 The kgnav Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgnav {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened or read.
class LoadError : public Error {
 public:
  using Error::Error;
};

// One or more rows of an input file did not parse. Line numbers are 1-based.
class MalformedRowError : public LoadError {
 public:
  MalformedRowError(std::string path, std::vector<size_t> lines);

  const std::string& path() const noexcept { return path_; }
  const std::vector<size_t>& lines() const noexcept { return lines_; }

 private:
  std::string path_;
  std::vector<size_t> lines_;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (e.g. unsorted input).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class RenderError : public Error {
 public:
  explicit RenderError(std::string placeholder);

  const std::string& placeholder() const noexcept { return placeholder_; }

 private:
  std::string placeholder_;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class ReplayMissError : public Error {
 public:
  explicit ReplayMissError(std::string key);

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// No question entity could be linked to the graph.
class NoStartingPointError : public Error {
 public:
  NoStartingPointError() : Error("no starting point") {}
};

}  // namespace kgnav
