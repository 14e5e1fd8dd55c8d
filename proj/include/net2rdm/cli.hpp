#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "net2rdm/error.hpp"

namespace net2rdm::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternal = 2;

/// E_* code printed on standard error for a library error.
std::string error_tag(ErrorCode code);

/// Runs `net2rdm <subcommand> ...`. Errors are reported as one
/// "E_CODE: message" line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Output directory for one command. Refuses a non-empty directory unless
/// `force`; every file handed out is deleted again unless commit() is called.
class OutputDir {
 public:
  OutputDir(std::filesystem::path dir, bool force);
  ~OutputDir();
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  std::filesystem::path file(const std::string& name);
  const std::filesystem::path& path() const noexcept { return dir_; }
  void commit() noexcept { committed_ = true; }

 private:
  std::filesystem::path dir_;
  bool created_ = false;
  bool committed_ = false;
  std::vector<std::filesystem::path> files_;
};

}  // namespace net2rdm::cli
