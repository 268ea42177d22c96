// Copyright 2026 The LabelDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LABELDP_IO_H_
#define LABELDP_IO_H_

#include <string>
#include <string_view>

namespace labeldp {

// Throws IoError if the file cannot be opened.
std::string ReadFile(const std::string& path);

// Writes to a sibling temporary file, then renames over `path`, so readers
// never observe a partially written result.
void WriteFileAtomic(const std::string& path, std::string_view contents);

// Formats a double with enough digits to round-trip exactly.
std::string FormatDouble(double value);

}  // namespace labeldp

#endif  // LABELDP_IO_H_
