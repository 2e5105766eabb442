#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <set>

#include "ddlpb/atomic_file.hpp"
#include "ddlpb/error.hpp"
#include "ddlpb/frames.hpp"
#include "generators.hpp"
#include "support.hpp"

using namespace ddlpb;
using namespace ddlpb::frames;
using namespace ddlpb::testing;

namespace {

const FrameIndex& corpus() {
  static const FrameIndex index = FrameIndex::load(frames_dir());
  return index;
}

constexpr auto kAll = std::numeric_limits<std::size_t>::max();

std::vector<std::string> ids(const std::vector<RolesetSummary>& hits) {
  std::vector<std::string> out;
  for (const auto& h : hits) out.push_back(h.sense_id);
  return out;
}

const char* kMiniFrame = R"(<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE frameset PUBLIC "-//PB//PropBank Frame v3.4 Transitional//EN" "frameset.dtd">
<frameset>
  <predicate lemma="order">
    <roleset id="order.02" name="request to be delivered">
      <aliases>
        <alias pos="v">order</alias>
        <alias pos="n">order</alias>
        <alias pos="v">ordering</alias>
      </aliases>
      <roles>
        <role descr="orderer" f="PAG" n="0"/>
        <role descr="thing ordered" f="PPT" n="1"/>
        <role descr="benefactive, ordered-for" f="GOL" n="2"/>
        <role descr="source" f="DIR" n="3"/>
        <role descr="where" f="LOC" n="M"/>
        <role descr="unlabelled modifier" f="" n="M"/>
      </roles>
      <lexlinks>
        <lexlink class="13.5.1" confidence="0.8" resource="VerbNet" src="manual" version="verbnet3.4"/>
      </lexlinks>
      <example name="order-v: double object" src="">
        <text>Stevie ordered it for her.</text>
        <propbank>
          <rel relloc="1">ordered</rel>
          <arg type="ARG0" start="0" end="0">Stevie</arg>
          <arg type="ARG1" start="2" end="2">it</arg>
        </propbank>
      </example>
    </roleset>
  </predicate>
</frameset>
)";

}  // namespace

TEST_CASE("parse_frame_file reads roles, aliases, lexlinks and examples") {
  auto sets = parse_frame_file(kMiniFrame, "order.xml");
  REQUIRE(sets.size() == 1);
  const auto& r = sets[0];
  CHECK(r.sense_id == "order.02");
  CHECK(r.lemma == "order");
  CHECK(r.definition == "request to be delivered");
  CHECK(std::find(r.aliases.begin(), r.aliases.end(), "ordering") != r.aliases.end());
  REQUIRE(r.roles.size() == 5);
  CHECK(r.roles[0] == Role{"ARG0", "orderer"});
  CHECK(r.roles[3] == Role{"ARG3", "source"});
  CHECK(r.roles[4] == Role{"ARGM-LOC", "where"});
  REQUIRE(r.lexlinks.size() == 1);
  CHECK(r.lexlinks[0].resource == "VerbNet");
  CHECK(r.lexlinks[0].identifier == "13.5.1");
  REQUIRE(r.examples.size() == 1);
  CHECK(r.examples[0].text == "Stevie ordered it for her.");
  REQUIRE(r.examples[0].argument_spans.size() == 2);
  CHECK(r.examples[0].argument_spans[0] == ArgumentSpan{"ARG0", "Stevie"});
}

TEST_CASE("parse_frame_file rejects malformed XML") {
  CHECK_THROWS_AS(parse_frame_file("<frameset><predicate>", "bad.xml"), ParseError);
  CHECK_THROWS_AS(parse_frame_file("<other/>", "other.xml"), ParseError);
}

TEST_CASE("role labels") {
  for (auto ok : {"ARG0", "ARG5", "ARGA", "ARGM-TMP", "ARGM-LOC", "ARGM-X"}) CHECK(is_valid_role_label(ok));
  for (auto bad : {"", "ARG", "arg0", "ARGM-", "ARGM-tmp", "ARG10", "ARGM_TMP", "ARGB"}) CHECK_FALSE(is_valid_role_label(bad));
}

TEST_CASE("loading skips bad files and reports them") {
  TempDir dir;
  write_file_atomic(dir / "order.xml", kMiniFrame);
  write_file_atomic(dir / "broken.xml", "<frameset><predicate lemma='x'>");
  write_file_atomic(dir / "README.md", "not a frame");
  LoadReport report;
  auto index = FrameIndex::load(dir.path(), &report);
  CHECK(index.size() == 1);
  CHECK(report.files_seen == 2);
  CHECK(report.files_parsed == 1);
  REQUIRE(report.failed_files.size() == 1);
  CHECK(report.failed_files[0].find("broken.xml") != std::string::npos);
}

TEST_CASE("loading a missing or empty corpus fails") {
  TempDir dir;
  CHECK_THROWS_AS(FrameIndex::load(dir / "nope"), LoadError);
  CHECK_THROWS_AS(FrameIndex::load(dir.path()), LoadError);
}

TEST_CASE("a frames/ subdirectory is picked up like a repository checkout") {
  TempDir dir;
  write_file_atomic(dir / "frames" / "order.xml", kMiniFrame);
  CHECK(FrameIndex::load(dir.path()).size() == 1);
}

TEST_CASE("roleset count equals the text-scan oracle") {
  LoadReport report;
  auto index = FrameIndex::load(frames_dir(), &report);
  CHECK(report.failed_files.empty());
  CHECK(index.size() == count_roleset_tags(frames_dir()));
}

TEST_CASE("search_by_lemma order") {
  auto hits = corpus().search_by_lemma("order", 10);
  auto got = ids(hits);
  REQUIRE(std::find(got.begin(), got.end(), "order.02") != got.end());
  auto it = std::find_if(hits.begin(), hits.end(), [](const auto& h) { return h.sense_id == "order.02"; });
  CHECK(it->definition == "request to be delivered");
  std::vector<std::string> labels;
  for (const auto& r : it->roles) labels.push_back(r.label);
  CHECK(labels == std::vector<std::string>{"ARG0", "ARG1", "ARG2", "ARG3"});
  CHECK(it->roles[0].description == "orderer");
  CHECK(std::is_sorted(got.begin(), got.end()));
}

TEST_CASE("alias lookup and normalization") {
  CHECK(ids(corpus().search_by_lemma("ordering")) == ids(corpus().search_by_lemma("order")));
  CHECK(ids(corpus().search_by_lemma("  ORDER ")) == ids(corpus().search_by_lemma("order")));
  CHECK(corpus().search_by_lemma("zzxqv").empty());
  CHECK(corpus().search_by_lemma("").empty());
  CHECK_THROWS_AS(corpus().search_by_lemma("order", 0), ValidationError);
  CHECK(corpus().search_by_lemma("order", 1).size() == 1);
}

TEST_CASE("phrasal lemmas are indexed under their underscore spelling") {
  CHECK(ids(corpus().search_by_lemma("look_up")) == ids(corpus().search_by_lemma("look up")));
  CHECK_FALSE(corpus().search_by_lemma("look_up").empty());
}

TEST_CASE("search_by_sense_id") {
  auto r = corpus().search_by_sense_id("order.02");
  REQUIRE(r.roles.size() >= 4);
  CHECK(r.roles[2].description.find("benefactive") != std::string::npos);
  bool stevie = std::any_of(r.examples.begin(), r.examples.end(),
                            [](const auto& e) { return e.text.find("Stevie ordered it") != std::string::npos; });
  CHECK(stevie);
  auto bare = corpus().search_by_sense_id("order.02", false);
  CHECK(bare.examples.empty());
  CHECK(bare.roles == r.roles);
  CHECK(bare.lexlinks == r.lexlinks);
}

TEST_CASE("unknown sense id carries the queried identifier") {
  // Brute-force confirmation that the order frame file has no order.99.
  auto text = read_file(frames_dir() / "order.xml");
  REQUIRE(text.find("order.99") == std::string::npos);
  try {
    corpus().search_by_sense_id("order.99");
    FAIL("expected NotFoundError");
  } catch (const NotFoundError& e) {
    CHECK(e.key() == "order.99");
    CHECK(std::string(e.what()).find("order.99") != std::string::npos);
  }
}

TEST_CASE("round-trip: every roleset is found under its lemma and every alias") {
  for (const auto& r : corpus().rolesets()) {
    std::vector<std::string> tokens = r.aliases;
    tokens.push_back(r.lemma);
    for (const auto& t : tokens) {
      auto got = ids(corpus().search_by_lemma(t, kAll));
      CHECK_MESSAGE(std::find(got.begin(), got.end(), r.sense_id) != got.end(), r.sense_id << " via " << t);
    }
  }
}

TEST_CASE("soundness and completeness against a regex scan of the XML") {
  auto scanned = scan_lookup_tokens(frames_dir());
  REQUIRE(scanned.size() == corpus().size());
  std::set<std::string> keys;
  for (const auto& [_, tokens] : scanned) keys.insert(tokens.begin(), tokens.end());
  keys.insert("zzxqv");
  for (const auto& key : keys) {
    std::vector<std::string> expected;
    for (const auto& [id, tokens] : scanned) {
      if (tokens.count(key)) expected.push_back(id);
    }
    CHECK_MESSAGE(ids(corpus().search_by_lemma(key, kAll)) == expected, key);
    for (std::size_t k : {1, 2, 10}) {
      auto hits = ids(corpus().search_by_lemma(key, k));
      CHECK(hits.size() == std::min(k, expected.size()));
      CHECK(std::equal(hits.begin(), hits.end(), expected.begin()));
    }
  }
}

TEST_CASE("two loads answer identically") {
  auto a = FrameIndex::load(frames_dir());
  auto b = FrameIndex::load(frames_dir());
  CHECK(a.rolesets() == b.rolesets());
  CHECK(a.index_keys() == b.index_keys());
  for (const auto& key : a.index_keys()) CHECK(a.search_by_lemma(key, kAll) == b.search_by_lemma(key, kAll));
}

TEST_CASE("from_rolesets drops later duplicates") {
  Roleset r1{"go.01", "go", "motion", {}, {{"ARG0", "goer"}}, {}, {}};
  Roleset r2{"go.01", "go", "other", {}, {{"ARG0", "x"}}, {}, {}};
  auto index = FrameIndex::from_rolesets({r1, r2});
  CHECK(index.size() == 1);
  CHECK(index.search_by_sense_id("go.01").definition == "motion");
}

TEST_CASE("summary JSON has no examples") {
  auto j = to_json(corpus().search_by_lemma("order", 1).at(0));
  CHECK(j.contains("sense_id"));
  CHECK(j.contains("roles"));
  CHECK_FALSE(j.contains("examples"));
}

// Runs only when DDLPB_FULL_FRAMES points at a complete frames checkout.
TEST_CASE("full corpus loads completely and round-trips") {
  const char* dir = std::getenv("DDLPB_FULL_FRAMES");
  if (!dir || !*dir) {
    MESSAGE("DDLPB_FULL_FRAMES not set; skipping the full-corpus check");
    return;
  }
  LoadReport report;
  auto index = FrameIndex::load(dir, &report);
  CHECK(report.failed_files.empty());
  CHECK(index.size() == count_roleset_tags(dir));
  for (const auto& r : index.rolesets()) {
    auto got = ids(index.search_by_lemma(r.lemma, kAll));
    CHECK(std::find(got.begin(), got.end(), r.sense_id) != got.end());
  }
}
