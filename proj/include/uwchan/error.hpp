/*
  Copyright 2026 The uwchan Authors

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

#ifndef UWCHAN_ERROR_HPP
#define UWCHAN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace uwchan {

// Mirrors uwc_status in uwchan.h; values must stay in sync.
enum class ErrorCode : int {
  kInvalidArgument = -1,
  kDomain = -2,
  kDegenerate = -3,
  kNormalization = -4,
  kIterationCap = -5,
  kFitNotConverged = -6,
  kMemoryCap = -7,
  kNumerical = -8,
  kIo = -9,
  kConfig = -10,
  kMissingStage = -11,
  kInternal = -99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const char* what) {
  if (!condition) throw Error(code, what);
}

}  // namespace uwchan

#endif  // UWCHAN_ERROR_HPP
