#include "regrest/workspace.hpp"

#include <filesystem>
#include <sstream>

#include "regrest/errors.hpp"
#include "regrest/subprocess.hpp"
#include "regrest/util.hpp"

namespace fs = std::filesystem;

namespace regrest {

namespace {

RunResult git(const std::string& repo, std::vector<std::string> args) {
  RunSpec spec;
  spec.argv = {"git", "-C", repo};
  spec.argv.insert(spec.argv.end(), args.begin(), args.end());
  spec.timeout_sec = 60;
  return run_process(spec);
}

} // namespace

std::string BuildRecipe::fingerprint() const {
  std::ostringstream ss;
  for (const auto& c : commands) ss << c << '\x1f';
  ss << '\x1e';
  for (const auto& b : binaries) ss << b << '\x1f';
  ss << '\x1e' << sanitizer_flags << '\x1f' << coverage_flags;
  return sha256_hex(ss.str());
}

CommitRef resolve_commit(const std::string& repo_path, const std::string& rev) {
  auto inside = git(repo_path, {"rev-parse", "--is-inside-work-tree"});
  if (!inside.ok() || trim(inside.out) != "true")
    throw NotARepository(repo_path + " is not a git work tree");

  auto resolved = git(repo_path, {"rev-parse", "--verify", rev + "^{commit}"});
  if (!resolved.ok())
    throw UnknownRevision("cannot resolve revision '" + rev + "': " +
                          trim(resolved.err));
  std::string commit_id = trim(resolved.out);

  auto parents = git(repo_path, {"rev-list", "--parents", "-n", "1", commit_id});
  if (!parents.ok())
    throw GitInvocationFailed("rev-list failed: " + trim(parents.err));
  std::istringstream ss(trim(parents.out));
  std::vector<std::string> ids;
  for (std::string tok; ss >> tok;) ids.push_back(tok);
  if (ids.size() < 2)
    throw NoParent("commit " + commit_id + " has no parent");
  if (ids.size() > 2)
    throw MergeCommit("commit " + commit_id + " is a merge commit (" +
                      std::to_string(ids.size() - 1) + " parents)");
  return CommitRef{repo_path, commit_id, ids[1]};
}

CommitInfo extract_commit_info(const CommitRef& ref) {
  auto msg = git(ref.repo_path, {"show", "-s", "--format=%B", ref.commit_id});
  if (!msg.ok())
    throw GitInvocationFailed("git show failed: " + trim(msg.err));
  auto diff = git(ref.repo_path, {"diff", ref.parent_id, ref.commit_id});
  if (!diff.ok())
    throw GitInvocationFailed("git diff failed: " + trim(diff.err));
  CommitInfo info;
  info.message = msg.out;
  info.raw_diff = diff.out;
  info.byte_len = info.message.size() + info.raw_diff.size();
  return info;
}

Workspace::Workspace(std::string cache_root) : cache_root_(std::move(cache_root)) {
  fs::create_directories(cache_root_);
}

BuildArtifact Workspace::build_version(const CommitRef& ref, Side side,
                                       const BuildRecipe& recipe,
                                       InstrumentProfile profile) {
  const std::string& commit_id =
      side == Side::Pre ? ref.parent_id : ref.commit_id;

  std::string key_material = commit_id + "|" + side_name(side) + "|" +
                             (profile.sanitizer ? "S" : "") +
                             (profile.coverage ? "C" : "") + "|" +
                             recipe.fingerprint();
  std::string key = sha256_hex(key_material).substr(0, 16);
  fs::path root = fs::path(cache_root_) / key;
  fs::path marker = root / ".build_ok";

  BuildArtifact artifact;
  artifact.side = side;
  artifact.commit_id = commit_id;
  artifact.root = root.string();
  artifact.binary_dir = root.string();
  artifact.profile = profile;

  if (fs::exists(marker)) {
    artifact.build_log = read_file((root / ".build_log").string());
    artifact.cache_hit = true;
    return artifact;
  }

  fs::remove_all(root);
  fs::create_directories(root);

  // git archive into an isolated directory: pre and post sides never share
  // files, and the user's checkout is left untouched.
  fs::path tarball = root / ".checkout.tar";
  auto archive = git(ref.repo_path, {"archive", "--format=tar", "-o",
                                     tarball.string(), commit_id});
  if (!archive.ok())
    throw CheckoutFailed("git archive failed for " + commit_id + ": " +
                         trim(archive.err));
  RunSpec untar;
  untar.argv = {"tar", "-xf", tarball.string(), "-C", root.string()};
  untar.timeout_sec = 120;
  if (!run_process(untar).ok())
    throw CheckoutFailed("extracting checkout of " + commit_id + " failed");
  fs::remove(tarball);

  std::string extra_flags;
  if (profile.sanitizer) extra_flags += recipe.sanitizer_flags;
  if (profile.coverage) {
    if (!extra_flags.empty()) extra_flags += ' ';
    extra_flags += recipe.coverage_flags;
  }

  std::string log;
  for (const std::string& command : recipe.commands) {
    RunSpec spec;
    spec.argv = {"/bin/sh", "-c", command};
    spec.cwd = root.string();
    spec.env_extra["EXTRA_CFLAGS"] = extra_flags;
    spec.timeout_sec = 600;
    auto res = run_process(spec);
    log += "$ " + command + "\n" + res.out + res.err;
    if (!res.ok()) {
      write_file((root / ".build_log").string(), log);
      throw BuildFailed("build command failed (" + command + "):\n" + log);
    }
  }

  for (const std::string& bin : recipe.binaries) {
    if (!fs::exists(root / bin))
      throw MissingBinary("recipe binary not produced: " + bin);
  }

  write_file((root / ".build_log").string(), log);
  write_file(marker.string(), commit_id + "\n");
  artifact.build_log = log;
  return artifact;
}

void reset_coverage_counters(const BuildArtifact& build) {
  for (const auto& entry : fs::recursive_directory_iterator(build.root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".gcda")
      fs::remove(entry.path());
  }
}

} // namespace regrest
