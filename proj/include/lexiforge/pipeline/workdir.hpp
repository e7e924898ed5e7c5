#pragma once

// Work-directory mechanics shared by every stage: content digests, the
// single-instance lock, and transactional stage directories with manifests.

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lexiforge/annotate/corpus.hpp"
#include "lexiforge/error.hpp"

namespace lexiforge::pipeline {

namespace fs = std::filesystem;
using annotate::json;

inline std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error(ErrorCode::io, "sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read '" + p.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string file_digest(const fs::path& p) { return sha256_hex(slurp(p)); }

inline void write_text(const fs::path& p, std::string_view content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::io, "cannot write '" + p.string() + "'");
}

// Regular files under `dir`, relative, sorted; manifest.json excluded.
inline std::vector<std::string> list_files(const fs::path& dir) {
  std::vector<std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir).generic_string();
    if (rel != "manifest.json") out.push_back(rel);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// One pipeline per work directory. The lock is a file created exclusively;
// a crash leaves it behind and the error says how to clear it.
class WorkdirLock {
 public:
  explicit WorkdirLock(const fs::path& workdir) : path_(workdir / ".lock") {
    fs::create_directories(workdir);
    const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
    if (fd < 0) {
      throw Error(ErrorCode::locked, "work directory '" + workdir.string() + "' is in use (remove '" +
                                         path_.string() + "' if no other run is active)");
    }
    const auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
  }
  ~WorkdirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  WorkdirLock(const WorkdirLock&) = delete;
  WorkdirLock& operator=(const WorkdirLock&) = delete;

 private:
  fs::path path_;
};

// What a stage body sees: where to write, and a place to record what it read
// and which parameters shaped the output.
struct StageContext {
  fs::path workdir;
  fs::path out;
  json params = json::object();
  std::vector<fs::path> inputs;

  fs::path input(const fs::path& p) {
    if (!fs::exists(p)) throw Error(ErrorCode::io, "missing input '" + p.string() + "'");
    inputs.push_back(p);
    return p;
  }
  // Output of an earlier stage, with a hint when it has not been run.
  fs::path stage_input(const std::string& stage, const std::string& file) {
    const auto p = workdir / stage / file;
    if (!fs::exists(p)) {
      throw Error(ErrorCode::io, "missing '" + (fs::path(stage) / file).generic_string() + "'; run the '" +
                                     stage.substr(0, stage.find('/')) + "' stage first");
    }
    inputs.push_back(p);
    return p;
  }
};

// Inputs inside the work directory are recorded relative to it so manifests
// do not depend on where the work directory lives.
inline json stage_manifest(const std::string& name, const StageContext& ctx) {
  json m;
  m["stage"] = name;
  m["params"] = ctx.params;
  json ins = json::array();
  auto sorted = ctx.inputs;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& p : sorted) {
    const auto rel = fs::relative(p, ctx.workdir);
    const bool inside = !rel.empty() && *rel.begin() != "..";
    ins.push_back({{"path", inside ? rel.generic_string() : p.string()}, {"sha256", file_digest(p)}});
  }
  m["inputs"] = std::move(ins);
  json outs = json::array();
  for (const auto& f : list_files(ctx.out)) outs.push_back({{"path", f}, {"sha256", file_digest(ctx.out / f)}});
  m["outputs"] = std::move(outs);
  return m;
}

// The lock guarantees nobody else is using the scratch area.
inline void remove_scratch_root(const fs::path& workdir) {
  std::error_code ec;
  fs::remove_all(workdir / ".tmp", ec);
}

// Runs `body` against a scratch directory. Success replaces workdir/<name>
// atomically; failure moves the partial output to workdir/failed/.
inline json run_stage(const fs::path& workdir, const std::string& name, const std::function<void(StageContext&)>& body) {
  const auto scratch = workdir / ".tmp" / name;
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  StageContext ctx{workdir, scratch};
  try {
    body(ctx);
    const auto manifest = stage_manifest(name, ctx);
    write_text(scratch / "manifest.json", manifest.dump(2) + "\n");
    const auto final_dir = workdir / name;
    fs::remove_all(final_dir);
    fs::create_directories(final_dir.parent_path());
    fs::rename(scratch, final_dir);
    remove_scratch_root(workdir);
    return manifest;
  } catch (const std::exception& e) {
    std::string flat = name;
    std::replace(flat.begin(), flat.end(), '/', '_');
    fs::path dest;
    for (int k = 1;; ++k) {
      dest = workdir / "failed" / (flat + "-" + std::to_string(k));
      if (!fs::exists(dest)) break;
    }
    std::error_code ec;
    fs::create_directories(dest.parent_path(), ec);
    fs::rename(scratch, dest, ec);
    if (!ec) write_text(dest / "error.txt", std::string(e.what()) + "\n");
    remove_scratch_root(workdir);
    throw;
  }
}

}  // namespace lexiforge::pipeline
