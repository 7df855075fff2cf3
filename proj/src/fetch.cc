//
// Copyright 2026 The stabdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <curl/curl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "stabdp/data_io.h"
#include "stabdp/status_macros.h"
#include "stabdp/text.h"

namespace stabdp {
namespace {

namespace fs = std::filesystem;

size_t AppendToString(char* data, size_t size, size_t count, void* user) {
  static_cast<std::string*>(user)->append(data, size * count);
  return size * count;
}

absl::StatusOr<std::string> Download(const std::string& url,
                                     long timeout_seconds) {
  static std::once_flag init;
  std::call_once(init, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
  CURL* curl = curl_easy_init();
  if (curl == nullptr) return absl::InternalError("curl_easy_init failed");
  std::string body;
  char error[CURL_ERROR_SIZE] = {0};
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, &AppendToString);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl, CURLOPT_TIMEOUT, timeout_seconds);
  curl_easy_setopt(curl, CURLOPT_ERRORBUFFER, error);
  CURLcode code = curl_easy_perform(curl);
  curl_easy_cleanup(curl);
  if (code != CURLE_OK) {
    return absl::UnavailableError(
        absl::StrCat("download of ", url, " failed: ",
                     error[0] != '\0' ? error : curl_easy_strerror(code)));
  }
  return body;
}

absl::Status WriteAtomically(const std::string& path,
                             const std::string& contents) {
  std::string temp = absl::StrCat(path, ".tmp.", ::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", temp));
    out << contents;
    out.close();
    if (!out) {
      std::error_code ignored;
      fs::remove(temp, ignored);
      return absl::DataLossError(absl::StrCat("write failed: ", temp));
    }
  }
  std::error_code ec;
  fs::rename(temp, path, ec);
  if (ec) {
    fs::remove(temp, ec);
    return absl::UnavailableError(
        absl::StrCat("cannot move ", temp, " to ", path));
  }
  return absl::OkStatus();
}

struct AdultColumn {
  const char* name;
  bool categorical;
};

constexpr std::array<AdultColumn, 14> kAdultColumns = {{
    {"age", false},
    {"workclass", true},
    {"fnlwgt", false},
    {"education", true},
    {"education_num", false},
    {"marital_status", true},
    {"occupation", true},
    {"relationship", true},
    {"race", true},
    {"sex", true},
    {"capital_gain", false},
    {"capital_loss", false},
    {"hours_per_week", false},
    {"native_country", true},
}};

}  // namespace

std::string Sha256Hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
             nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

absl::StatusOr<std::string> ConvertAdult(const std::string& raw,
                                         int64_t* dropped) {
  std::vector<std::vector<std::string>> rows;
  std::vector<double> labels;
  int64_t skipped = 0;
  int64_t line_number = 0;
  for (absl::string_view line : absl::StrSplit(raw, '\n')) {
    ++line_number;
    absl::string_view trimmed = absl::StripAsciiWhitespace(line);
    // Blank lines and the "|1x3 Cross validator" banner of the test split.
    if (trimmed.empty() || trimmed.front() == '|') continue;
    std::vector<std::string> fields = absl::StrSplit(trimmed, ',');
    if (fields.size() != kAdultColumns.size() + 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("adult line ", line_number, ": expected ",
                       kAdultColumns.size() + 1, " fields, found ",
                       fields.size()));
    }
    bool missing = false;
    for (std::string& f : fields) {
      f = std::string(absl::StripAsciiWhitespace(f));
      if (f == "?") missing = true;
    }
    if (missing) {
      ++skipped;
      continue;
    }
    std::string income = fields.back();
    if (!income.empty() && income.back() == '.') income.pop_back();
    if (income == ">50K") {
      labels.push_back(1.0);
    } else if (income == "<=50K") {
      labels.push_back(0.0);
    } else {
      return absl::InvalidArgumentError(absl::StrCat(
          "adult line ", line_number, ": unknown income '", income, "'"));
    }
    fields.pop_back();
    for (size_t j = 0; j < kAdultColumns.size(); ++j) {
      double v;
      if (!kAdultColumns[j].categorical && !absl::SimpleAtod(fields[j], &v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("adult line ", line_number, ": column ",
                         kAdultColumns[j].name, " is not numeric: '",
                         fields[j], "'"));
      }
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) return absl::InvalidArgumentError("adult data: no rows");

  std::vector<std::vector<std::string>> categories(kAdultColumns.size());
  for (size_t j = 0; j < kAdultColumns.size(); ++j) {
    if (!kAdultColumns[j].categorical) continue;
    std::set<std::string> seen;
    for (const auto& row : rows) seen.insert(row[j]);
    categories[j].assign(seen.begin(), seen.end());
  }

  std::ostringstream out;
  for (size_t j = 0; j < kAdultColumns.size(); ++j) {
    if (!kAdultColumns[j].categorical) {
      out << kAdultColumns[j].name << ',';
    } else {
      for (const std::string& c : categories[j]) {
        out << kAdultColumns[j].name << '=' << c << ',';
      }
    }
  }
  out << "income\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < kAdultColumns.size(); ++j) {
      if (!kAdultColumns[j].categorical) {
        double v = 0.0;
        (void)absl::SimpleAtod(rows[i][j], &v);
        out << FormatDouble(v) << ',';
      } else {
        for (const std::string& c : categories[j]) {
          out << (rows[i][j] == c ? '1' : '0') << ',';
        }
      }
    }
    out << (labels[i] > 0 ? '1' : '0') << '\n';
  }
  if (dropped != nullptr) *dropped = skipped;
  return out.str();
}

FetchOptions FetchOptionsFromEnvironment(FetchOptions options) {
  if (const char* v = std::getenv("STABDP_CACHE_DIR"); v && *v) {
    options.cache_dir = v;
  }
  if (const char* v = std::getenv("STABDP_FETCH_URL"); v && *v) {
    options.url = v;
  }
  if (const char* v = std::getenv("STABDP_FETCH_SHA256"); v && *v) {
    options.sha256 = v;
  }
  return options;
}

absl::StatusOr<std::string> FetchDataset(const FetchOptions& options) {
  if (options.name.empty() ||
      options.name.find_first_of("/\\") != std::string::npos) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid dataset name '", options.name, "'"));
  }
  const std::string path =
      (fs::path(options.cache_dir) / (options.name + ".csv")).string();
  if (fs::exists(path)) return path;
  if (options.offline) {
    return absl::NotFoundError(
        absl::StrCat("offline and no cached file at ", path));
  }
  if (options.url.empty()) {
    return absl::InvalidArgumentError(
        "no download URL configured (set fetch.url or STABDP_FETCH_URL)");
  }
  if (options.sha256.empty()) {
    return absl::InvalidArgumentError(
        "no checksum configured (set fetch.sha256 or STABDP_FETCH_SHA256)");
  }
  STABDP_ASSIGN_OR_RETURN(std::string raw,
                          Download(options.url, options.timeout_seconds));
  std::string digest = Sha256Hex(raw);
  if (digest != absl::AsciiStrToLower(options.sha256)) {
    return absl::DataLossError(absl::StrCat("checksum mismatch for ",
                                            options.url, ": expected ",
                                            options.sha256, ", got ", digest));
  }
  std::string contents = raw;
  if (options.name == "adult") {
    STABDP_ASSIGN_OR_RETURN(contents, ConvertAdult(raw));
  }
  std::error_code ec;
  fs::create_directories(options.cache_dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", options.cache_dir, ": ", ec.message()));
  }
  STABDP_RETURN_IF_ERROR(WriteAtomically(path, contents));
  return path;
}

}  // namespace stabdp
