/*
   Copyright 2026 The pbwtphi Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pbwtphi {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed panel text. line is 1-based; 0 means "whole input".
class ParseError : public Error {
  public:
    ParseError(std::size_t line, std::size_t expected, std::size_t got, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line), expected_(expected), got_(got) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t expected() const noexcept { return expected_; }
    [[nodiscard]] std::size_t got() const noexcept { return got_; }

  private:
    std::size_t line_;
    std::size_t expected_;
    std::size_t got_;
};

class ArgumentError : public Error {
  public:
    using Error::Error;
};

class RangeError : public Error {
  public:
    using Error::Error;
};

// Inputs that are individually valid but do not belong together, or a
// structure whose internal bookkeeping disagrees with itself.
class ConsistencyError : public Error {
  public:
    using Error::Error;
};

// Bad on-disk index. offset is the byte position where decoding failed.
class FormatError : public Error {
  public:
    FormatError(std::uint64_t offset, const std::string& what)
        : Error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

    [[nodiscard]] std::uint64_t offset() const noexcept { return offset_; }

  private:
    std::uint64_t offset_;
};

class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace pbwtphi
