#include "doctest.h"

#include <filesystem>

#include "regrest/errors.hpp"
#include "regrest/subprocess.hpp"
#include "regrest/workspace.hpp"
#include "regrest/util.hpp"

#include "support/fixture_repo.hpp"

using namespace regrest;
using namespace regrest::testing;

namespace fs = std::filesystem;

TEST_CASE("resolve_commit finds the target and its parent") {
  ExprRepo repo = make_expr_repo(make_temp_dir("ws-resolve"));
  CommitRef ref = resolve_commit(repo.path, repo.bug_intro_id);
  CHECK(ref.commit_id == repo.bug_intro_id);
  CHECK(ref.parent_id == repo.base_id);
  CHECK(ref.repo_path == repo.path);

  CommitRef head = resolve_commit(repo.path, "HEAD");
  CHECK(head.commit_id == repo.bug_fix_id);
  CHECK(head.parent_id == repo.bug_intro_id);
}

TEST_CASE("resolve_commit rejects bad requests") {
  ExprRepo repo = make_expr_repo(make_temp_dir("ws-bad"));
  CHECK_THROWS_AS(resolve_commit(repo.path, "deadbeefdeadbeef"),
                  UnknownRevision);
  CHECK_THROWS_AS(resolve_commit(make_temp_dir("ws-norepo"), "HEAD"),
                  NotARepository);

  // the root commit has no parent to diff against
  CHECK_THROWS_AS(resolve_commit(repo.path, repo.base_id), NoParent);

  // merges are ambiguous
  git_in(repo.path, {"checkout", "-q", "-b", "side", repo.base_id});
  write_file(repo.path + "/side.txt", "side\n");
  commit_all(repo.path, "Side branch change");
  git_in(repo.path, {"checkout", "-q", "main"});
  git_in(repo.path, {"-c", "user.name=fixture", "-c", "user.email=f@t",
                     "merge", "-q", "--no-ff", "-m", "Merge side", "side"});
  CHECK_THROWS_AS(resolve_commit(repo.path, "HEAD"), MergeCommit);
}

TEST_CASE("extract_commit_info carries message and parent diff") {
  ExprRepo repo = make_expr_repo(make_temp_dir("ws-info"));
  CommitInfo info = extract_commit_info(resolve_commit(repo.path, repo.bug_fix_id));
  CHECK(info.message.find("Fix missing bounds check") != std::string::npos);
  CHECK(info.raw_diff.find("&& i < 7") != std::string::npos);
  CHECK(info.byte_len > 0);
}

TEST_CASE("build_version produces runnable binaries for both sides") {
  ExprRepo repo = make_expr_repo(make_temp_dir("ws-build"));
  Workspace ws(make_temp_dir("ws-cache"));
  CommitRef ref = resolve_commit(repo.path, repo.bug_intro_id);

  BuildArtifact pre = ws.build_version(ref, Side::Pre, fixture_recipe(), {});
  BuildArtifact post = ws.build_version(ref, Side::Post, fixture_recipe(), {});
  CHECK(pre.commit_id == repo.base_id);
  CHECK(post.commit_id == repo.bug_intro_id);
  CHECK(pre.root != post.root);
  CHECK(fs::exists(fs::path(pre.binary_dir) / "expr"));

  // the two sides genuinely differ: "$abc" is 0 before, 3 after
  write_file(pre.binary_dir + "/in.txt", "$abc");
  write_file(post.binary_dir + "/in.txt", "$abc");
  RunSpec rs;
  rs.argv = {pre.binary_dir + "/expr", pre.binary_dir + "/in.txt"};
  CHECK(run_process(rs).out == "0\n");
  rs.argv = {post.binary_dir + "/expr", post.binary_dir + "/in.txt"};
  CHECK(run_process(rs).out == "3\n");
}

TEST_CASE("builds are cached by commit, side, profile and recipe") {
  ExprRepo repo = make_expr_repo(make_temp_dir("ws-cachehit"));
  Workspace ws(make_temp_dir("ws-cache2"));
  CommitRef ref = resolve_commit(repo.path, repo.bug_intro_id);

  BuildArtifact first = ws.build_version(ref, Side::Post, fixture_recipe(), {});
  CHECK(!first.cache_hit);
  BuildArtifact second = ws.build_version(ref, Side::Post, fixture_recipe(), {});
  CHECK(second.cache_hit);
  CHECK(second.root == first.root);

  // a different profile must not collide with the plain build
  BuildArtifact sanitized =
      ws.build_version(ref, Side::Post, fixture_recipe(), {true, false});
  CHECK(sanitized.root != first.root);

  BuildRecipe other = fixture_recipe();
  other.commands.push_back("true");
  BuildArtifact changed = ws.build_version(ref, Side::Post, other, {});
  CHECK(changed.root != first.root);
}

TEST_CASE("sanitizer profile wires ASan into the binary") {
  ExprRepo repo = make_expr_repo(make_temp_dir("ws-asan"));
  Workspace ws(make_temp_dir("ws-cache3"));
  CommitRef ref = resolve_commit(repo.path, repo.bug_intro_id);
  BuildArtifact post =
      ws.build_version(ref, Side::Post, fixture_recipe(), {true, false});

  write_file(post.binary_dir + "/in.txt", "$aaaaaaaaaaaaaaaaaaaa");
  RunSpec rs;
  rs.argv = {post.binary_dir + "/expr", post.binary_dir + "/in.txt"};
  auto res = run_process(rs);
  CHECK(res.exit_code != 0);
  CHECK(res.err.find("Sanitizer") != std::string::npos);
  CHECK(res.err.find("heap-buffer-overflow") != std::string::npos);
}

TEST_CASE("coverage profile emits and resets gcov counters") {
  ExprRepo repo = make_expr_repo(make_temp_dir("ws-cov"));
  Workspace ws(make_temp_dir("ws-cache4"));
  CommitRef ref = resolve_commit(repo.path, repo.bug_intro_id);
  BuildArtifact post =
      ws.build_version(ref, Side::Post, fixture_recipe(), {false, true});

  auto count_gcda = [&] {
    int n = 0;
    for (auto& e : fs::recursive_directory_iterator(post.root))
      if (e.path().extension() == ".gcda") ++n;
    return n;
  };
  reset_coverage_counters(post);
  CHECK(count_gcda() == 0);

  write_file(post.binary_dir + "/in.txt", "1+2");
  RunSpec rs;
  rs.argv = {post.binary_dir + "/expr", post.binary_dir + "/in.txt"};
  rs.cwd = post.binary_dir;
  CHECK(run_process(rs).out == "3\n");
  CHECK(count_gcda() > 0);

  reset_coverage_counters(post);
  CHECK(count_gcda() == 0);
  reset_coverage_counters(post); // idempotent
}

TEST_CASE("failing recipes and missing binaries raise build errors") {
  ExprRepo repo = make_expr_repo(make_temp_dir("ws-fail"));
  Workspace ws(make_temp_dir("ws-cache5"));
  CommitRef ref = resolve_commit(repo.path, repo.bug_intro_id);

  BuildRecipe broken = fixture_recipe();
  broken.commands = {"cc $EXTRA_CFLAGS -o expr no_such_file.c"};
  CHECK_THROWS_AS(ws.build_version(ref, Side::Post, broken, {}), BuildFailed);

  BuildRecipe wrong_bin = fixture_recipe();
  wrong_bin.binaries = {"not_produced"};
  CHECK_THROWS_AS(ws.build_version(ref, Side::Post, wrong_bin, {}),
                  MissingBinary);
}
