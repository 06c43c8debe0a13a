// Writes a small synthetic corpus (git repo plus manifest) for trying the CLI.

#include <cstdio>
#include <cstdlib>

#include "corpus.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: make_demo_corpus DIR [PRS_PER_COHORT] [SEED]\n");
    return 1;
  }
  redline::fixtures::CorpusOptions opt;
  if (argc > 2) opt.per_cohort = std::atoi(argv[2]);
  unsigned seed = argc > 3 ? static_cast<unsigned>(std::atoi(argv[3])) : 1u;
  opt.with_comments = true;
  std::filesystem::create_directories(argv[1]);
  auto corpus = redline::fixtures::build_corpus(std::filesystem::absolute(argv[1]), seed, opt);
  std::printf("%s\n", corpus.manifest.c_str());
  return 0;
}
