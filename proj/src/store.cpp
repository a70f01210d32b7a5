#include "cordtag/store.hpp"

#include <sqlite3.h>

#include <mutex>

#include "cordtag/text.hpp"

namespace cordtag {

namespace {

constexpr int kSchemaVersion = 1;

constexpr const char* kSchemaSql = R"sql(
CREATE TABLE IF NOT EXISTS schema_version (
  version INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS documents (
  paper_id TEXT PRIMARY KEY,
  title TEXT NOT NULL,
  paragraph_count INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS paragraphs (
  paper_id TEXT NOT NULL REFERENCES documents(paper_id),
  idx INTEGER NOT NULL,
  text TEXT NOT NULL,
  PRIMARY KEY (paper_id, idx)
);
CREATE TABLE IF NOT EXISTS mentions (
  paper_id TEXT NOT NULL,
  paragraph INTEGER NOT NULL,
  start INTEGER NOT NULL,
  "end" INTEGER NOT NULL,
  entity_str TEXT NOT NULL,
  entity_type TEXT NOT NULL,
  entity_id TEXT NOT NULL,
  backend TEXT NOT NULL,
  run_id INTEGER NOT NULL,
  UNIQUE (paper_id, paragraph, start, "end", entity_type, entity_id),
  FOREIGN KEY (paper_id, paragraph) REFERENCES paragraphs(paper_id, idx)
);
CREATE TABLE IF NOT EXISTS runs (
  run_id INTEGER PRIMARY KEY AUTOINCREMENT,
  config_fingerprint TEXT NOT NULL,
  started_at TEXT NOT NULL,
  finished_at TEXT
);
CREATE TABLE IF NOT EXISTS completions (
  paper_id TEXT NOT NULL,
  backend TEXT NOT NULL,
  config_fingerprint TEXT NOT NULL,
  run_id INTEGER NOT NULL,
  PRIMARY KEY (paper_id, backend, config_fingerprint)
);
CREATE INDEX IF NOT EXISTS mentions_by_paper ON mentions(paper_id, paragraph);
)sql";

[[noreturn]] void fail(sqlite3* db, const std::string& context) {
  throw StoreError(StoreError::Kind::StorageFailure,
                   context + ": " + sqlite3_errmsg(db));
}

// RAII prepared statement.
class Statement {
 public:
  Statement(sqlite3* db, const std::string& sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK) {
      fail(db, "prepare failed for: " + sql);
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }

  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int idx, const std::string& value) {
    if (sqlite3_bind_text(stmt_, idx, value.c_str(),
                          static_cast<int>(value.size()),
                          SQLITE_TRANSIENT) != SQLITE_OK) {
      fail(db_, "bind failed");
    }
    return *this;
  }
  Statement& bind(int idx, std::int64_t value) {
    if (sqlite3_bind_int64(stmt_, idx, value) != SQLITE_OK) {
      fail(db_, "bind failed");
    }
    return *this;
  }

  // Returns true while a row is available.
  bool step() {
    int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    fail(db_, "step failed");
  }

  std::string column_text(int idx) const {
    const unsigned char* p = sqlite3_column_text(stmt_, idx);
    int n = sqlite3_column_bytes(stmt_, idx);
    return p ? std::string(reinterpret_cast<const char*>(p),
                           static_cast<std::size_t>(n))
             : std::string();
  }
  std::int64_t column_int64(int idx) const {
    return sqlite3_column_int64(stmt_, idx);
  }
  bool column_null(int idx) const {
    return sqlite3_column_type(stmt_, idx) == SQLITE_NULL;
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw StoreError(StoreError::Kind::StorageFailure,
                     std::string("exec failed: ") + msg);
  }
}

std::size_t type_index(EntityType type) {
  return static_cast<std::size_t>(type);
}

}  // namespace

struct Store::Impl {
  sqlite3* db = nullptr;
  mutable std::mutex mutex;

  ~Impl() {
    if (db) sqlite3_close(db);
  }

  // Runs fn inside BEGIN IMMEDIATE .. COMMIT, rolling back on exceptions.
  template <typename Fn>
  auto transaction(Fn&& fn) {
    exec(db, "BEGIN IMMEDIATE");
    try {
      auto result = fn();
      exec(db, "COMMIT");
      return result;
    } catch (...) {
      try {
        exec(db, "ROLLBACK");
      } catch (...) {
      }
      throw;
    }
  }

  std::optional<std::string> paragraph_text_unlocked(
      const std::string& paper_id, std::size_t paragraph) {
    Statement stmt(db, "SELECT text FROM paragraphs WHERE paper_id=? AND idx=?");
    stmt.bind(1, paper_id).bind(2, static_cast<std::int64_t>(paragraph));
    if (!stmt.step()) return std::nullopt;
    return stmt.column_text(0);
  }

  // Validates span integrity and inserts one mention. Returns true if a new
  // row was inserted (false: duplicate under the uniqueness key).
  bool insert_mention_unlocked(std::int64_t run_id, const std::string& backend,
                               const EntityMention& m) {
    auto text = paragraph_text_unlocked(m.paper_id, m.location.paragraph);
    if (!text) {
      throw StoreError(StoreError::Kind::SpanIntegrityViolation,
                       "mention references missing paragraph " +
                           std::to_string(m.location.paragraph) + " of \"" +
                           m.paper_id + "\"");
    }
    if (m.location.start > m.location.end || m.entity_str.empty()) {
      throw StoreError(StoreError::Kind::SpanIntegrityViolation,
                       "malformed mention span in \"" + m.paper_id + "\"");
    }
    std::string slice =
        utf8_slice(*text, m.location.start, m.location.end + 1);
    if (slice != m.entity_str) {
      throw StoreError(StoreError::Kind::SpanIntegrityViolation,
                       "mention text \"" + m.entity_str +
                           "\" does not match stored paragraph slice \"" +
                           slice + "\" at " + m.paper_id + ":" +
                           std::to_string(m.location.paragraph) + "[" +
                           std::to_string(m.location.start) + ".." +
                           std::to_string(m.location.end) + "]");
    }
    Statement stmt(db,
                   "INSERT OR IGNORE INTO mentions (paper_id, paragraph, "
                   "start, \"end\", entity_str, entity_type, entity_id, "
                   "backend, run_id) VALUES (?,?,?,?,?,?,?,?,?)");
    stmt.bind(1, m.paper_id)
        .bind(2, static_cast<std::int64_t>(m.location.paragraph))
        .bind(3, static_cast<std::int64_t>(m.location.start))
        .bind(4, static_cast<std::int64_t>(m.location.end))
        .bind(5, m.entity_str)
        .bind(6, std::string(to_string(m.entity.entity_type)))
        .bind(7, m.entity.entity_id)
        .bind(8, backend)
        .bind(9, run_id);
    stmt.step();
    return sqlite3_changes(db) > 0;
  }
};

Store::Store(const std::filesystem::path& db_path) : impl_(new Impl) {
  if (sqlite3_open(db_path.string().c_str(), &impl_->db) != SQLITE_OK) {
    std::string msg = impl_->db ? sqlite3_errmsg(impl_->db) : "out of memory";
    throw StoreError(StoreError::Kind::StorageFailure,
                     "cannot open database " + db_path.string() + ": " + msg);
  }
  exec(impl_->db, "PRAGMA foreign_keys=ON");
  exec(impl_->db, "PRAGMA busy_timeout=10000");
  exec(impl_->db, kSchemaSql);
  Statement read(impl_->db, "SELECT version FROM schema_version LIMIT 1");
  if (read.step()) {
    std::int64_t version = read.column_int64(0);
    if (version > kSchemaVersion) {
      throw StoreError(StoreError::Kind::SchemaTooNew,
                       "database schema version " + std::to_string(version) +
                           " is newer than supported version " +
                           std::to_string(kSchemaVersion));
    }
  } else {
    Statement init(impl_->db, "INSERT INTO schema_version (version) VALUES (?)");
    init.bind(1, static_cast<std::int64_t>(kSchemaVersion));
    init.step();
  }
}

Store::~Store() = default;

void Store::upsert_document(const Document& doc) {
  if (doc.paper_id.empty()) {
    throw StoreError(StoreError::Kind::StorageFailure,
                     "document with empty paper_id");
  }
  std::vector<ParagraphRef> paras = paragraphs(doc, Scope::Fulltext);
  std::lock_guard<std::mutex> lock(impl_->mutex);
  impl_->transaction([&] {
    bool changed = false;
    Statement info(impl_->db,
                   "SELECT paragraph_count FROM documents WHERE paper_id=?");
    info.bind(1, doc.paper_id);
    std::optional<std::int64_t> old_count;
    if (info.step()) old_count = info.column_int64(0);

    if (!old_count) {
      Statement ins(impl_->db,
                    "INSERT INTO documents (paper_id, title, paragraph_count) "
                    "VALUES (?,?,?)");
      ins.bind(1, doc.paper_id)
          .bind(2, doc.title)
          .bind(3, static_cast<std::int64_t>(paras.size()));
      ins.step();
      for (const ParagraphRef& p : paras) {
        Statement pins(impl_->db,
                       "INSERT INTO paragraphs (paper_id, idx, text) "
                       "VALUES (?,?,?)");
        pins.bind(1, doc.paper_id)
            .bind(2, static_cast<std::int64_t>(p.paragraph))
            .bind(3, p.text);
        pins.step();
      }
      return 0;
    }

    for (const ParagraphRef& p : paras) {
      auto old_text =
          impl_->paragraph_text_unlocked(doc.paper_id, p.paragraph);
      if (old_text && *old_text == p.text) continue;
      changed = true;
      if (old_text) {
        Statement del(impl_->db,
                      "DELETE FROM mentions WHERE paper_id=? AND paragraph=?");
        del.bind(1, doc.paper_id)
            .bind(2, static_cast<std::int64_t>(p.paragraph));
        del.step();
        Statement upd(impl_->db,
                      "UPDATE paragraphs SET text=? WHERE paper_id=? AND idx=?");
        upd.bind(1, p.text)
            .bind(2, doc.paper_id)
            .bind(3, static_cast<std::int64_t>(p.paragraph));
        upd.step();
      } else {
        Statement ins(impl_->db,
                      "INSERT INTO paragraphs (paper_id, idx, text) "
                      "VALUES (?,?,?)");
        ins.bind(1, doc.paper_id)
            .bind(2, static_cast<std::int64_t>(p.paragraph))
            .bind(3, p.text);
        ins.step();
      }
    }
    if (static_cast<std::size_t>(*old_count) > paras.size()) {
      changed = true;
      Statement delm(impl_->db,
                     "DELETE FROM mentions WHERE paper_id=? AND paragraph>=?");
      delm.bind(1, doc.paper_id)
          .bind(2, static_cast<std::int64_t>(paras.size()));
      delm.step();
      Statement delp(impl_->db,
                     "DELETE FROM paragraphs WHERE paper_id=? AND idx>=?");
      delp.bind(1, doc.paper_id)
          .bind(2, static_cast<std::int64_t>(paras.size()));
      delp.step();
    }
    Statement title(impl_->db, "SELECT title FROM documents WHERE paper_id=?");
    title.bind(1, doc.paper_id);
    title.step();
    if (title.column_text(0) != doc.title ||
        static_cast<std::size_t>(*old_count) != paras.size()) {
      changed = true;
    }
    if (changed) {
      Statement upd(impl_->db,
                    "UPDATE documents SET title=?, paragraph_count=? "
                    "WHERE paper_id=?");
      upd.bind(1, doc.title)
          .bind(2, static_cast<std::int64_t>(paras.size()))
          .bind(3, doc.paper_id);
      upd.step();
      // Content changed: prior tagging no longer applies.
      Statement delc(impl_->db, "DELETE FROM completions WHERE paper_id=?");
      delc.bind(1, doc.paper_id);
      delc.step();
    }
    return 0;
  });
}

std::size_t Store::document_count() const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  Statement stmt(impl_->db, "SELECT COUNT(*) FROM documents");
  stmt.step();
  return static_cast<std::size_t>(stmt.column_int64(0));
}

std::vector<std::string> Store::paper_ids() const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  Statement stmt(impl_->db, "SELECT paper_id FROM documents ORDER BY paper_id");
  std::vector<std::string> out;
  while (stmt.step()) {
    out.push_back(stmt.column_text(0));
  }
  return out;
}

std::optional<StoredDocumentInfo> Store::document_info(
    const std::string& paper_id) const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  Statement stmt(impl_->db,
                 "SELECT title, paragraph_count FROM documents "
                 "WHERE paper_id=?");
  stmt.bind(1, paper_id);
  if (!stmt.step()) return std::nullopt;
  StoredDocumentInfo info;
  info.paper_id = paper_id;
  info.title = stmt.column_text(0);
  info.paragraph_count = static_cast<std::size_t>(stmt.column_int64(1));
  return info;
}

std::vector<ParagraphRef> Store::document_paragraphs(
    const std::string& paper_id, Scope scope) const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  std::string sql =
      "SELECT idx, text FROM paragraphs WHERE paper_id=?";
  if (scope == Scope::Abstracts) sql += " AND idx<=1";
  sql += " ORDER BY idx";
  Statement stmt(impl_->db, sql);
  stmt.bind(1, paper_id);
  std::vector<ParagraphRef> out;
  while (stmt.step()) {
    out.push_back({paper_id, static_cast<std::size_t>(stmt.column_int64(0)),
                   stmt.column_text(1)});
  }
  return out;
}

std::optional<std::string> Store::paragraph_text(const std::string& paper_id,
                                                 std::size_t paragraph) const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  return impl_->paragraph_text_unlocked(paper_id, paragraph);
}

std::int64_t Store::begin_run(const std::string& config_fingerprint) {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  Statement stmt(impl_->db,
                 "INSERT INTO runs (config_fingerprint, started_at) "
                 "VALUES (?, strftime('%Y-%m-%dT%H:%M:%fZ','now'))");
  stmt.bind(1, config_fingerprint);
  stmt.step();
  return sqlite3_last_insert_rowid(impl_->db);
}

void Store::finish_run(std::int64_t run_id) {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  Statement stmt(impl_->db,
                 "UPDATE runs SET finished_at="
                 "strftime('%Y-%m-%dT%H:%M:%fZ','now') WHERE run_id=?");
  stmt.bind(1, run_id);
  stmt.step();
}

std::size_t Store::insert_mentions(std::int64_t run_id,
                                   const std::string& backend,
                                   const std::vector<EntityMention>& mentions) {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  return impl_->transaction([&] {
    std::size_t inserted = 0;
    for (const EntityMention& m : mentions) {
      if (impl_->insert_mention_unlocked(run_id, backend, m)) {
        ++inserted;
      }
    }
    return inserted;
  });
}

std::array<std::size_t, 4> Store::commit_document_results(
    std::int64_t run_id, const std::string& paper_id,
    const std::string& backend, const std::string& config_fingerprint,
    const std::vector<EntityMention>& mentions) {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  return impl_->transaction([&] {
    std::array<std::size_t, 4> inserted{};
    for (const EntityMention& m : mentions) {
      if (m.paper_id != paper_id) {
        throw StoreError(StoreError::Kind::StorageFailure,
                         "mention for \"" + m.paper_id +
                             "\" in commit for \"" + paper_id + "\"");
      }
      if (impl_->insert_mention_unlocked(run_id, backend, m)) {
        ++inserted[type_index(m.entity.entity_type)];
      }
    }
    Statement mark(impl_->db,
                   "INSERT OR REPLACE INTO completions "
                   "(paper_id, backend, config_fingerprint, run_id) "
                   "VALUES (?,?,?,?)");
    mark.bind(1, paper_id)
        .bind(2, backend)
        .bind(3, config_fingerprint)
        .bind(4, run_id);
    mark.step();
    return inserted;
  });
}

bool Store::is_complete(const std::string& paper_id, const std::string& backend,
                        const std::string& config_fingerprint) const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  Statement stmt(impl_->db,
                 "SELECT 1 FROM completions WHERE paper_id=? AND backend=? "
                 "AND config_fingerprint=?");
  stmt.bind(1, paper_id).bind(2, backend).bind(3, config_fingerprint);
  return stmt.step();
}

std::vector<std::string> Store::completed_papers(
    const std::string& backend, const std::string& config_fingerprint) const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  Statement stmt(impl_->db,
                 "SELECT paper_id FROM completions WHERE backend=? AND "
                 "config_fingerprint=? ORDER BY paper_id");
  stmt.bind(1, backend).bind(2, config_fingerprint);
  std::vector<std::string> out;
  while (stmt.step()) {
    out.push_back(stmt.column_text(0));
  }
  return out;
}

std::vector<EntityMention> Store::query_mentions(
    const MentionFilter& filter) const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  if ((filter.paper_ids && filter.paper_ids->empty()) ||
      (filter.entity_types && filter.entity_types->empty())) {
    return {};
  }
  std::string sql =
      "SELECT paper_id, paragraph, start, \"end\", entity_str, entity_type, "
      "entity_id FROM mentions WHERE 1=1";
  std::vector<std::string> text_params;
  if (filter.paper_ids) {
    sql += " AND paper_id IN (";
    for (std::size_t i = 0; i < filter.paper_ids->size(); ++i) {
      sql += i ? ",?" : "?";
      text_params.push_back((*filter.paper_ids)[i]);
    }
    sql += ")";
  }
  if (filter.entity_types) {
    sql += " AND entity_type IN (";
    for (std::size_t i = 0; i < filter.entity_types->size(); ++i) {
      sql += i ? ",?" : "?";
      text_params.push_back(
          std::string(to_string((*filter.entity_types)[i])));
    }
    sql += ")";
  }
  if (filter.scope == Scope::Abstracts) {
    sql += " AND paragraph<=1";
  }
  sql +=
      " ORDER BY paper_id, paragraph, start, \"end\", entity_type, entity_id";
  Statement stmt(impl_->db, sql);
  for (std::size_t i = 0; i < text_params.size(); ++i) {
    stmt.bind(static_cast<int>(i) + 1, text_params[i]);
  }
  std::vector<EntityMention> out;
  while (stmt.step()) {
    EntityMention m;
    m.paper_id = stmt.column_text(0);
    m.location.paragraph = static_cast<std::size_t>(stmt.column_int64(1));
    m.location.start = static_cast<std::size_t>(stmt.column_int64(2));
    m.location.end = static_cast<std::size_t>(stmt.column_int64(3));
    m.entity_str = stmt.column_text(4);
    auto type = entity_type_from_string(stmt.column_text(5));
    if (!type) {
      throw StoreError(StoreError::Kind::StorageFailure,
                       "unknown entity_type in store: " + stmt.column_text(5));
    }
    m.entity.entity_type = *type;
    m.entity.entity_id = stmt.column_text(6);
    out.push_back(std::move(m));
  }
  return out;
}

std::uint64_t Store::mention_count() const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  Statement stmt(impl_->db, "SELECT COUNT(*) FROM mentions");
  stmt.step();
  return static_cast<std::uint64_t>(stmt.column_int64(0));
}

std::array<std::uint64_t, 4> Store::mention_counts(Scope scope) const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  std::string sql = "SELECT entity_type, COUNT(*) FROM mentions";
  if (scope == Scope::Abstracts) sql += " WHERE paragraph<=1";
  sql += " GROUP BY entity_type";
  Statement stmt(impl_->db, sql);
  std::array<std::uint64_t, 4> counts{};
  while (stmt.step()) {
    auto type = entity_type_from_string(stmt.column_text(0));
    if (type) {
      counts[type_index(*type)] =
          static_cast<std::uint64_t>(stmt.column_int64(1));
    }
  }
  return counts;
}

}  // namespace cordtag
