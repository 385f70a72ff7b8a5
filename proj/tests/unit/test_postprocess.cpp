#include <doctest.h>

#include "adaptchunk/error.hpp"
#include "adaptchunk/postprocess.hpp"
#include "synth.hpp"

using namespace adaptchunk;

namespace {

std::vector<std::size_t> sizes(const Document& doc, const Chunking& c) {
  WhitespaceCounter ws;
  std::vector<std::size_t> out;
  for (const auto& ch : c.chunks) out.push_back(ws.count(doc.slice(ch.start, ch.end)));
  return out;
}

struct Fixture {
  Document doc;
  Chunking chunking;
};

Fixture fixed(std::vector<std::size_t> s, std::uint64_t seed = 1) {
  synth::Rng rng(seed);
  Fixture f;
  f.doc = synth::document_with_token_sizes(rng, "d", s, f.chunking);
  return f;
}

const WhitespaceCounter kWs;

}  // namespace

TEST_CASE("bounds validation") {
  CHECK_NOTHROW(SizeBounds{}.validate());
  CHECK_THROWS_AS((SizeBounds{0, 10, 10}).validate(), ConfigError);
  CHECK_THROWS_AS((SizeBounds{10, 10, 20}).validate(), ConfigError);
  CHECK_THROWS_AS((SizeBounds{10, 20, 15}).validate(), ConfigError);
}

TEST_CASE("resplit leaves well-sized chunks alone") {
  auto f = fixed({300, 900, 1100});
  auto out = resplit_oversized(f.chunking, f.doc, {}, {}, kWs);
  CHECK(out.chunks.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(out.chunks[k].start == f.chunking.chunks[k].start);
    CHECK(out.chunks[k].end == f.chunking.chunks[k].end);
  }
}

TEST_CASE("resplit breaks an oversized chunk") {
  // one 2400-token chunk made of three paragraphs
  synth::Rng rng(2);
  std::string t;
  for (int p = 0; p < 3; ++p) {
    for (int w = 0; w < 800; ++w) t += synth::word(rng) + (w + 1 < 800 ? " " : "");
    if (p < 2) t += "\n\n";
  }
  Document doc;
  doc.id = "d";
  doc.text = Utf8Text(t);
  doc.blocks.push_back({0, doc.length(), BlockKind::kParagraph});
  auto one = chunking_from_cuts(doc, {}, "m");
  auto out = resplit_oversized(one, doc, {}, {}, kWs);
  CHECK(out.chunks.size() >= 2);
  for (auto s : sizes(doc, out)) CHECK(s <= 1100);
  CHECK(validate_chunking(doc, out).empty());
}

TEST_CASE("resplit changes only the oversized span") {
  auto f = fixed({500, 1500, 800});
  auto out = resplit_oversized(f.chunking, f.doc, {}, {}, kWs);
  REQUIRE(out.chunks.size() > 3);
  CHECK(out.chunks.front().start == f.chunking.chunks[0].start);
  CHECK(out.chunks.front().end == f.chunking.chunks[0].end);
  CHECK(out.chunks.back().start == f.chunking.chunks[2].start);
  CHECK(out.chunks.back().end == f.chunking.chunks[2].end);
  for (std::size_t k = 1; k + 1 < out.chunks.size(); ++k) {
    CHECK(out.chunks[k].start >= f.chunking.chunks[1].start);
    CHECK(out.chunks[k].end <= f.chunking.chunks[1].end);
    CHECK(out.chunks[k].token_count <= 1100);
  }
}

TEST_CASE("merge tiny examples") {
  auto a = fixed({50, 500});
  CHECK(sizes(a.doc, merge_tiny(a.chunking, a.doc, {}, kWs)) == std::vector<std::size_t>{550});

  auto b = fixed({50, 1120});
  CHECK(sizes(b.doc, merge_tiny(b.chunking, b.doc, {}, kWs)) == std::vector<std::size_t>{50, 1120});

  auto c = fixed({1000, 60, 70, 900});
  CHECK(sizes(c.doc, merge_tiny(c.chunking, c.doc, {}, kWs)) == std::vector<std::size_t>{1060, 970});

  // cascades of tiny chunks collapse
  auto d = fixed({10, 20, 30, 40});
  CHECK(sizes(d.doc, merge_tiny(d.chunking, d.doc, {}, kWs)) == std::vector<std::size_t>{100});

  // a merge within the cap is still taken when nothing fits under the max
  auto e = fixed({1090, 50});
  CHECK(sizes(e.doc, merge_tiny(e.chunking, e.doc, {}, kWs)) == std::vector<std::size_t>{1140});

  // a single tiny chunk has nothing to merge with
  auto g = fixed({30});
  CHECK(sizes(g.doc, merge_tiny(g.chunking, g.doc, {}, kWs)) == std::vector<std::size_t>{30});
}

TEST_CASE("postprocess of a compliant chunking is the identity") {
  auto f = fixed({300, 1000, 150, 800});
  auto out = postprocess(f.chunking, f.doc, {}, {}, kWs);
  CHECK(sizes(f.doc, out) == std::vector<std::size_t>{300, 1000, 150, 800});
}

TEST_CASE("pathological semantic-style input") {
  std::vector<std::size_t> s = {1, 17000, 1, 1, 1, 600, 1, 1125, 1, 1120, 40};
  auto f = fixed(s, 3);
  const SizeBounds bounds;
  auto out = postprocess(f.chunking, f.doc, bounds, {}, kWs);
  CHECK(validate_chunking(f.doc, out).empty());
  const auto sz = sizes(f.doc, out);
  for (std::size_t k = 0; k < sz.size(); ++k) {
    CHECK(sz[k] <= bounds.merge_cap);
    if (sz[k] < bounds.min) {
      if (k > 0) CHECK(sz[k - 1] + sz[k] > bounds.merge_cap);
      if (k + 1 < sz.size()) CHECK(sz[k + 1] + sz[k] > bounds.merge_cap);
    }
  }
}

TEST_CASE("postprocess guarantees on random chunkings") {
  synth::Rng rng(4);
  const SizeBounds bounds;
  for (int i = 0; i < 60; ++i) {
    synth::Options o;
    o.max_words = 400;
    auto doc = synth::document(rng, "p", o);
    auto raw = synth::random_chunking(rng, doc, 40);
    auto once = postprocess(raw, doc, bounds, {}, kWs);
    CHECK(validate_chunking(doc, once).empty());
    const auto sz = sizes(doc, once);
    for (std::size_t k = 0; k < sz.size(); ++k) {
      CHECK(once.chunks[k].token_count == sz[k]);
      CHECK(sz[k] <= bounds.merge_cap);
      if (sz[k] < bounds.min) {
        if (k > 0) CHECK(kWs.count(doc.slice(once.chunks[k - 1].start, once.chunks[k].end)) > bounds.merge_cap);
        if (k + 1 < sz.size()) CHECK(kWs.count(doc.slice(once.chunks[k].start, once.chunks[k + 1].end)) > bounds.merge_cap);
      }
    }
    auto twice = postprocess(once, doc, bounds, {}, kWs);
    CHECK(twice.chunks == once.chunks);
  }
}
