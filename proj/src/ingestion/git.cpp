#include "ingestion/git.hpp"

#include <set>

#include "common/subprocess.hpp"

namespace redline::ingestion {

namespace {

using Kind = GitError::Kind;

bool regular_file(const std::string& mode) { return mode == "100644" || mode == "100755"; }

}  // namespace

GitRepo::GitRepo(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (!std::filesystem::is_directory(path_, ec))
    throw GitError(Kind::NotAGitRepository, "not a directory: " + path_.string());
  auto r = process::run({"git", "rev-parse", "--git-dir"}, path_);
  if (r.exit_code != 0) throw GitError(Kind::NotAGitRepository, "not a git repository: " + path_.string());
}

std::string GitRepo::git(const std::vector<std::string>& args, const std::string& input) const {
  std::vector<std::string> argv = {"git", "-c", "core.quotepath=off"};
  argv.insert(argv.end(), args.begin(), args.end());
  process::Result r;
  try {
    r = process::run(argv, path_, input);
  } catch (const process::SpawnError& e) {
    throw GitError(Kind::CommandFailed, e.what());
  }
  if (r.exit_code != 0) {
    std::string cmd;
    for (const auto& a : args) cmd += " " + a;
    throw GitError(Kind::CommandFailed, "git" + cmd + " failed in " + path_.string() + ": " + r.err);
  }
  return r.out;
}

std::string GitRepo::resolve_commit(const std::string& rev) const {
  auto r = process::run({"git", "rev-parse", "--verify", "--quiet", rev + "^{commit}"}, path_);
  if (r.exit_code != 0) throw GitError(Kind::CommitNotFound, "commit " + rev + " not found in " + path_.string());
  while (!r.out.empty() && (r.out.back() == '\n' || r.out.back() == '\r')) r.out.pop_back();
  return r.out;
}

std::map<std::string, TreeEntry> GitRepo::tree(const std::string& commit) const {
  std::string out = git({"ls-tree", "-r", "-z", "--full-tree", commit});
  std::map<std::string, TreeEntry> entries;
  std::size_t pos = 0;
  while (pos < out.size()) {
    std::size_t end = out.find('\0', pos);
    if (end == std::string::npos) end = out.size();
    std::string_view rec(out.data() + pos, end - pos);
    pos = end + 1;
    // "<mode> <type> <object>\t<path>"
    auto tab = rec.find('\t');
    if (tab == std::string_view::npos) continue;
    std::string_view meta = rec.substr(0, tab);
    auto s1 = meta.find(' '), s2 = meta.rfind(' ');
    if (s1 == std::string_view::npos || s2 == s1) continue;
    std::string mode(meta.substr(0, s1));
    if (!regular_file(mode)) continue;
    entries[std::string(rec.substr(tab + 1))] = TreeEntry{mode, std::string(meta.substr(s2 + 1))};
  }
  return entries;
}

std::vector<std::string> GitRepo::read_blobs(const std::vector<std::string>& object_ids) const {
  if (object_ids.empty()) return {};
  std::string input;
  for (const auto& id : object_ids) input += id + "\n";
  std::string out = git({"cat-file", "--batch"}, input);
  std::vector<std::string> blobs;
  blobs.reserve(object_ids.size());
  std::size_t pos = 0;
  for (const auto& id : object_ids) {
    std::size_t nl = out.find('\n', pos);
    if (nl == std::string::npos) throw GitError(Kind::CommandFailed, "truncated cat-file output for " + id);
    std::string header = out.substr(pos, nl - pos);
    // "<object> <type> <size>" or "<object> missing"
    auto sp = header.rfind(' ');
    if (header.size() >= 8 && header.compare(header.size() - 8, 8, " missing") == 0)
      throw GitError(Kind::CommandFailed, "object " + id + " missing");
    std::size_t size = std::stoull(header.substr(sp + 1));
    if (nl + 1 + size > out.size()) throw GitError(Kind::CommandFailed, "truncated blob " + id);
    blobs.push_back(out.substr(nl + 1, size));
    pos = nl + 1 + size + 1;
  }
  return blobs;
}

bool ExtensionFilter::matches(std::string_view path) const {
  for (const auto& ext : extensions)
    if (path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0) return true;
  return false;
}

bool is_text(std::string_view bytes) {
  std::size_t i = 0;
  const auto* s = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  while (i < n) {
    unsigned char c = s[i];
    if (c == 0) return false;
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len;
    std::uint32_t cp;
    if ((c & 0xe0) == 0xc0) len = 2, cp = c & 0x1f;
    else if ((c & 0xf0) == 0xe0) len = 3, cp = c & 0x0f;
    else if ((c & 0xf8) == 0xf0) len = 4, cp = c & 0x07;
    else return false;
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((s[i + k] & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (s[i + k] & 0x3f);
    }
    static const std::uint32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
    i += len;
  }
  return true;
}

std::vector<SnapshotFile> snapshot_files(const GitRepo& repo, const std::string& commit, const ExtensionFilter& filter,
                                         std::vector<std::string>* warnings) {
  std::vector<std::string> paths, ids;
  for (const auto& [path, entry] : repo.tree(commit)) {
    if (!filter.matches(path)) continue;
    paths.push_back(path);
    ids.push_back(entry.object_id);
  }
  auto blobs = repo.read_blobs(ids);
  std::vector<SnapshotFile> out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!is_text(blobs[i])) {
      if (warnings) warnings->push_back("skipping non-text file " + paths[i] + " at " + commit.substr(0, 12));
      continue;
    }
    out.push_back({paths[i], std::move(blobs[i])});
  }
  return out;
}

std::vector<FilePairDiff> extract_file_pairs(const PullRequestRecord& pr, const ExtensionFilter& filter,
                                             std::vector<std::string>* warnings) {
  GitRepo repo(pr.repo_path);
  const std::string base = repo.resolve_commit(pr.base_commit);
  const std::string head = repo.resolve_commit(pr.head_commit);
  auto pre = repo.tree(base), post = repo.tree(head);
  std::set<std::string> paths;
  for (const auto& [p, _] : pre)
    if (filter.matches(p)) paths.insert(p);
  for (const auto& [p, _] : post)
    if (filter.matches(p)) paths.insert(p);

  struct Pending {
    std::string path;
    const TreeEntry* pre;
    const TreeEntry* post;
  };
  std::vector<Pending> changed;
  std::vector<std::string> ids;
  for (const auto& p : paths) {
    auto a = pre.find(p), b = post.find(p);
    const TreeEntry* ea = a == pre.end() ? nullptr : &a->second;
    const TreeEntry* eb = b == post.end() ? nullptr : &b->second;
    if (ea && eb && ea->object_id == eb->object_id) continue;
    changed.push_back({p, ea, eb});
    if (ea) ids.push_back(ea->object_id);
    if (eb) ids.push_back(eb->object_id);
  }
  auto blobs = repo.read_blobs(ids);
  std::vector<FilePairDiff> out;
  std::size_t k = 0;
  for (const auto& c : changed) {
    FilePairDiff d;
    d.path = c.path;
    if (c.pre) d.pre_text = std::move(blobs[k++]);
    if (c.post) d.post_text = std::move(blobs[k++]);
    if ((d.pre_text && !is_text(*d.pre_text)) || (d.post_text && !is_text(*d.post_text))) {
      if (warnings) warnings->push_back("skipping non-text file " + c.path + " in " + pr.pr_id);
      continue;
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace redline::ingestion
