#include <doctest.h>

#include <algorithm>
#include <set>

#include "htmlphish/corpus.hpp"
#include "htmlphish/digest.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace htmlphish;
using namespace htmlphish::corpus;
using testing::FixtureDoc;
using testing::TempDir;

namespace {

DocumentRecord record(const std::string& id, const std::string& html, int label = 0,
                      std::optional<Timestamp> at = std::nullopt, const std::string& url = "") {
  DocumentRecord::Fields f;
  f.id = id;
  f.url = url.empty() ? "http://example.test/" + id : url;
  f.label = label_from_int(label);
  f.collected_at = at;
  return DocumentRecord::from_bytes(std::move(f), html);
}

Timestamp day(int d) { return Timestamp{std::chrono::seconds{86400LL * d}}; }

std::vector<std::string> ids(const CorpusManifest& m) {
  std::vector<std::string> out;
  for (const auto& r : m.records()) out.push_back(r.id());
  return out;
}

}  // namespace

TEST_CASE("load_manifest counts classes") {
  TempDir tmp;
  const auto path = testing::write_manifest(
      tmp.path(), {{"a", "http://a.test/", 1, "<html>phish</html>", "2018-11-11T00:00:00Z"},
                   {"b", "http://b.test/", 0, "<html>legit</html>", std::nullopt}});
  const auto m = load_manifest(path);
  REQUIRE(m.size() == 2);
  CHECK(m.class_count(Label::Legitimate) == 1);
  CHECK(m.class_count(Label::Phishing) == 1);
  CHECK(m.records()[0].html() == "<html>phish</html>");
  CHECK(m.records()[0].collected_at().has_value());
  CHECK_FALSE(m.records()[1].collected_at().has_value());
  CHECK(m.warnings().empty());
}

TEST_CASE("load_manifest drops a repeated (url, digest) pair with a warning") {
  TempDir tmp;
  const auto path = testing::write_manifest(tmp.path(), {{"a", "http://same.test/", 1, "<p>x</p>"},
                                                        {"b", "http://other.test/", 0, "<p>y</p>"},
                                                        {"c", "http://same.test/", 1, "<p>x</p>"}});
  const auto m = load_manifest(path);
  CHECK(ids(m) == std::vector<std::string>{"a", "b"});
  CHECK(m.class_count(Label::Phishing) == 1);
  REQUIRE(m.warnings().size() == 1);
  CHECK(m.warnings()[0].find("'c'") != std::string::npos);
  // Oracle: the dropped record really does share url and content digest.
  CHECK(sha256_file(tmp / "html/a.html") == sha256_file(tmp / "html/c.html"));
}

TEST_CASE("load_manifest keeps identical content under different urls") {
  TempDir tmp;
  const auto path = testing::write_manifest(
      tmp.path(), {{"a", "http://one.test/", 1, "<p>x</p>"}, {"b", "http://two.test/", 1, "<p>x</p>"}});
  CHECK(load_manifest(path).size() == 2);
}

TEST_CASE("load_manifest errors name the offending line") {
  TempDir tmp;
  testing::write_text(tmp / "html/a.html", "<p>a</p>");
  testing::write_text(tmp / "bad_label.jsonl",
                      "{\"id\":\"a\",\"url\":\"u\",\"label\":0,\"html_path\":\"html/a.html\"}\n"
                      "{\"id\":\"b\",\"url\":\"v\",\"label\":2,\"html_path\":\"html/a.html\"}\n");
  try {
    load_manifest(tmp / "bad_label.jsonl");
    FAIL("expected CorpusError");
  } catch (const CorpusError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }

  testing::write_text(tmp / "malformed.jsonl", "{not json\n");
  CHECK_THROWS_WITH_AS(load_manifest(tmp / "malformed.jsonl"), doctest::Contains(":1:"),
                       CorpusError);

  testing::write_text(tmp / "missing_html.jsonl",
                      "{\"id\":\"a\",\"url\":\"u\",\"label\":0,\"html_path\":\"html/none.html\"}\n");
  CHECK_THROWS_AS(load_manifest(tmp / "missing_html.jsonl"), CorpusError);
  CHECK_THROWS_AS(load_manifest(tmp / "absent.jsonl"), CorpusError);

  testing::write_text(tmp / "dup_id.jsonl",
                      "{\"id\":\"a\",\"url\":\"u\",\"label\":0,\"html_path\":\"html/a.html\"}\n"
                      "{\"id\":\"a\",\"url\":\"v\",\"label\":0,\"html_path\":\"html/a.html\"}\n");
  CHECK_THROWS_AS(load_manifest(tmp / "dup_id.jsonl"), CorpusError);
}

TEST_CASE("load_manifest ignores unknown keys and blank lines") {
  TempDir tmp;
  testing::write_text(tmp / "html/a.html", "<p>a</p>");
  testing::write_text(tmp / "m.jsonl",
                      "{\"id\":\"a\",\"url\":\"u\",\"label\":1,\"html_path\":\"html/a.html\","
                      "\"source\":\"feed\"}\n\n");
  CHECK(load_manifest(tmp / "m.jsonl").size() == 1);
}

TEST_CASE("html decoding replaces invalid bytes but keeps raw bytes") {
  const auto r = record("a", "caf\xC3\xA9 \xFF");
  CHECK(r.html() == "caf\xC3\xA9 \xEF\xBF\xBD");
  CHECK(r.raw_bytes() == "caf\xC3\xA9 \xFF");
}

TEST_CASE("sanitize drops empty documents") {
  const CorpusManifest m({record("a", "<p>1</p>"), record("b", "<p>2</p>"), record("c", ""),
                          record("d", "<p>4</p>"), record("e", "<p>5</p>")});
  const auto s = sanitize(m);
  CHECK(ids(s) == std::vector<std::string>{"a", "b", "d", "e"});
  CHECK(s.warnings().size() == 1);
}

TEST_CASE("sanitize treats whitespace-only documents as empty") {
  const CorpusManifest m({record("a", " \n\t "), record("b", "<p>x</p>")});
  CHECK(ids(sanitize(m)) == std::vector<std::string>{"b"});
}

TEST_CASE("sanitize keeps the first of byte-identical documents") {
  const CorpusManifest m({record("a", "<p>same</p>", 0, std::nullopt, "http://one.test/"),
                          record("b", "<p>other</p>"),
                          record("c", "<p>same</p>", 1, std::nullopt, "http://two.test/")});
  const auto s = sanitize(m);
  CHECK(ids(s) == std::vector<std::string>{"a", "b"});
  // Oracle: the survivors have pairwise distinct digests.
  std::set<std::string> digests;
  for (const auto& r : s.records()) digests.insert(to_hex(sha256(r.raw_bytes())));
  CHECK(digests.size() == s.size());
}

TEST_CASE("sanitize is idempotent and leaves a clean corpus alone") {
  const CorpusManifest clean({record("a", "<p>1</p>", 1), record("b", "<p>2</p>", 0)});
  const auto once = sanitize(clean);
  CHECK(ids(once) == ids(clean));
  CHECK(once.class_counts() == clean.class_counts());
  CHECK(once.warnings().empty());

  const CorpusManifest dirty({record("a", ""), record("b", "x"), record("c", "x"), record("d", "y")});
  const auto s1 = sanitize(dirty);
  const auto s2 = sanitize(s1);
  CHECK(ids(s1) == ids(s2));
}

TEST_CASE("temporal_split partitions by the boundary") {
  const CorpusManifest m({record("d9", "9", 0, day(9)), record("d1", "1", 1, day(1)),
                          record("d10", "10", 0, day(10)), record("d2", "2", 1, day(2))});
  const auto split = temporal_split(m, day(5));
  CHECK(ids(split.train) == std::vector<std::string>{"d1", "d2"});
  CHECK(ids(split.test) == std::vector<std::string>{"d9", "d10"});

  const auto early = temporal_split(m, day(0));
  CHECK(early.train.empty());
  CHECK(early.test.size() == 4);

  const auto exact = temporal_split(m, day(9));
  CHECK(ids(exact.test) == std::vector<std::string>{"d9", "d10"});
}

TEST_CASE("temporal_split requires timestamps") {
  const CorpusManifest m({record("a", "1", 0, day(1)), record("b", "2", 0)});
  CHECK_THROWS_AS(temporal_split(m, day(5)), CorpusError);
}

TEST_CASE("temporal_split separates two collection weeks with their class counts") {
  std::vector<DocumentRecord> records;
  auto add = [&](std::size_t n, int label, int first_day, const char* prefix) {
    for (std::size_t i = 0; i < n; ++i) {
      records.push_back(record(std::string(prefix) + std::to_string(i),
                               std::string(prefix) + std::to_string(i), label,
                               day(first_day + static_cast<int>(i % 30))));
    }
  };
  add(23000, 0, 0, "d1-legit-");
  add(2300, 1, 0, "d1-phish-");
  add(24000, 0, 100, "d2-legit-");
  add(2400, 1, 100, "d2-phish-");
  const auto split = temporal_split(CorpusManifest(std::move(records)), day(60));
  CHECK(split.train.class_count(Label::Legitimate) == 23000);
  CHECK(split.train.class_count(Label::Phishing) == 2300);
  CHECK(split.test.class_count(Label::Legitimate) == 24000);
  CHECK(split.test.class_count(Label::Phishing) == 2400);
  CHECK(overlapping_ids(split.train, split.test).empty());
}

TEST_CASE("write_corpus round-trips through load_manifest") {
  TempDir tmp;
  const CorpusManifest m({record("a", "<p>\xFF</p>", 1, day(3)), record("b", "<p>b</p>", 0)});
  const auto path = write_corpus(m, tmp.path());
  const auto back = load_manifest(path);
  REQUIRE(back.size() == 2);
  CHECK(back.records()[0].raw_bytes() == "<p>\xFF</p>");
  CHECK(back.records()[0].collected_at() == day(3));
  CHECK(back.records()[1].label() == Label::Legitimate);
}

TEST_CASE("overlapping_ids reports shared ids") {
  const CorpusManifest a({record("x", "1"), record("y", "2")});
  const CorpusManifest b({record("y", "3"), record("z", "4")});
  CHECK(overlapping_ids(a, b) == std::vector<std::string>{"y"});
}
