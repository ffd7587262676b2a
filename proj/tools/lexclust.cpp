// Command-line front end: lexicon, context, cluster, compare.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lexclust/pipeline.hpp"

namespace {

constexpr const char* kFormats = R"(File formats:
  corpus        UTF-8 text, one sentence per line, whitespace-separated tokens.
  lexicon       rank<TAB>word<TAB>frequency, rank = 0-based lexicon index; the
                last row is RARE.
  context       header "N D W kind" (W = comma-separated windows, 0 for
                embeddings; kind = count|embedding), then N rows of D numbers.
  embeddings    word v1 ... vd per line (word2vec text format).
  clusters      "# method=... k=... key=value ..." header, then
                word<TAB>cluster_id in lexicon order.
  embedding     word<TAB>v1..v(k-1) per word, then "#CENTER<TAB>id<TAB>v..." rows.
  merges        step<TAB>cluster_a<TAB>cluster_b<TAB>I_after.
  scores        "#higher_is_better={true|false}", then
                sample_id<TAB>score_model1<TAB>score_model2.
  report        key=value lines: vi, nvi, and with scores oracle_mean, m1_mean,
                m2_mean, agree, m1_better, m2_better.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word-lexicon clustering: count representations, spectral, K-means and Brown clustering"};
  app.footer(kFormats);
  app.require_subcommand(1);

  lexclust::RunConfig cfg;
  std::string sigma = "median";

  auto* lex = app.add_subcommand("lexicon", "Build the frequency-ranked lexicon from a corpus");
  lex->add_option("--corpus", cfg.corpus, "Corpus file")->required();
  lex->add_option("-N,--size", cfg.n, "Lexicon size including RARE")->capture_default_str()->check(CLI::Range(2, 1 << 30));
  lex->add_option("-o,--out", cfg.out, "Lexicon TSV to write")->required();

  auto* ctx = app.add_subcommand("context", "Build window count matrices (or load embeddings)");
  ctx->add_option("--corpus", cfg.corpus, "Corpus file");
  ctx->add_option("--lexicon", cfg.lexicon, "Lexicon TSV")->required();
  ctx->add_option("-M,--descriptors", cfg.m, "Number of descriptor words")->capture_default_str()->check(CLI::PositiveNumber);
  ctx->add_option("-W,--windows", cfg.windows, "Window sizes")->delimiter(',')->capture_default_str();
  ctx->add_flag("--concat", cfg.concat, "Also write the feature-wise concatenation of all windows");
  ctx->add_option("--embeddings", cfg.embeddings, "Load this vector file instead of counting");
  ctx->add_option("-o,--out", cfg.out, "Output prefix (<out>.w<W>.ctx, <out>.concat.ctx, <out>.emb.ctx)")->required();

  auto* clu = app.add_subcommand("cluster", "Cluster the lexicon");
  clu->add_option("--method", cfg.method, "kmeans | spectral-njw | spectral-ncut | brown")
      ->required()
      ->check(CLI::IsMember(lexclust::cluster_methods()));
  clu->add_option("-k,--clusters", cfg.k, "Number of clusters")->capture_default_str()->check(CLI::Range(2, 1 << 30));
  clu->add_option("--seed", cfg.seed, "Random seed (required for kmeans and spectral methods)");
  clu->add_option("--restarts", cfg.restarts, "K-means restarts")->capture_default_str()->check(CLI::PositiveNumber);
  clu->add_option("--context", cfg.context, "Context matrix file (kmeans, spectral)");
  clu->add_option("--corpus", cfg.corpus, "Corpus file (brown)");
  clu->add_option("--lexicon", cfg.lexicon, "Lexicon TSV")->required();
  clu->add_option("--kernel", cfg.kernel, "skew | skew-raw | gaussian")
      ->capture_default_str()
      ->check(CLI::IsMember({"skew", "skew-raw", "gaussian"}));
  clu->add_option("--a", cfg.a, "Skew smoothing weight in (0, 1)")->capture_default_str();
  clu->add_option("--sigma", sigma, "Kernel width, or 'median'")->capture_default_str();
  clu->add_option("--brown-window", cfg.brown_window, "Brown active clusters (default k)");
  clu->add_option("-o,--out", cfg.out, "Cluster file to write")->required();

  auto* cmp = app.add_subcommand("compare", "Compare two cluster files (VI, normalized VI, oracle analysis)");
  cmp->add_option("first", cfg.cluster_a, "First cluster file")->required();
  cmp->add_option("second", cfg.cluster_b, "Second cluster file")->required();
  cmp->add_option("--scores", cfg.scores, "Per-sample score file for oracle analysis");
  cmp->add_option("-o,--out", cfg.out, "Report file (default: standard output)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sigma != "median") {
      try {
        cfg.sigma = std::stod(sigma);
      } catch (const std::exception&) {
        throw lexclust::Error("--sigma must be a number or 'median', got '" + sigma + "'");
      }
    }
    if (*lex) {
      const auto l = lexclust::cmd_lexicon(cfg);
      std::cerr << "wrote " << l.size() << " lexicon entries to " << cfg.out << '\n';
    } else if (*ctx) {
      if (cfg.embeddings.empty() && cfg.corpus.empty()) throw lexclust::Error("context needs --corpus or --embeddings");
      for (const auto& p : lexclust::cmd_context(cfg, &std::cerr)) std::cerr << "wrote " << p << '\n';
    } else if (*clu) {
      const auto c = lexclust::cmd_cluster(cfg);
      const auto empty = c.empty_clusters();
      if (!empty.empty()) std::cerr << empty.size() << " of " << c.k << " clusters are empty\n";
      std::cerr << "wrote " << cfg.out << '\n';
    } else if (*cmp) {
      lexclust::cmd_compare(cfg, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
