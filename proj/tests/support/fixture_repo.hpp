#pragma once

#include <string>
#include <utility>
#include <vector>

#include "regrest/workspace.hpp"

namespace regrest::testing {

// Tiny C expression interpreter with three commits: a correct base, a commit
// introducing a heap overflow in a new feature, and the commit fixing it.
struct ExprRepo {
  std::string path;
  std::string base_id;
  std::string bug_intro_id; // overflow when a register name exceeds 8 chars
  std::string bug_fix_id;
};

ExprRepo make_expr_repo(const std::string& dir);

// Single-file program whose HEAD commit changes exactly lines 10 and 11;
// line 10/11 run only for inputs starting with 'A'.
std::string make_lines_repo(const std::string& dir);

// Program that overflows identically on both sides of its HEAD commit (the
// commit touches an unrelated print statement).
std::string make_samebug_repo(const std::string& dir);

// Compile + link in two steps so gcov counter files match their notes files.
BuildRecipe fixture_recipe(const std::string& source = "expr.c",
                           const std::string& binary = "expr");

// Replay-store helper: entries are (ordinal, response_text), stored under the
// wildcard prompt hash.
void write_replay_store(const std::string& dir,
                        const std::vector<std::pair<int, std::string>>& entries);

std::string make_temp_dir(const std::string& hint);

// git plumbing for fixtures; aborts the test on failure
void git_in(const std::string& repo, const std::vector<std::string>& args);
std::string git_out(const std::string& repo, const std::vector<std::string>& args);
void commit_all(const std::string& repo, const std::string& message);

} // namespace regrest::testing
