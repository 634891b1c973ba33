//! Deterministic synthetic corpora and graphs for tests, demos and the CLI.
//!
//! Each (author, issue) pair writes from its own small pool of sentences,
//! so with the hashing test embedder an author's documents on one issue
//! share sentence vectors while different pairs do not.

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    Corpus, DocType, Document, EntityKind, EntityRecord, EventRecord, EventSource, IssueRecord,
};
use crate::error::Result;
use crate::graphgen::{DiscourseGraph, Node, NodeKind};

fn toks(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.to_string()).collect()
}

fn pos_for(sentences: &[Vec<String>]) -> Vec<Vec<String>> {
    sentences
        .iter()
        .map(|s| {
            s.iter()
                .map(|t| if t.starts_with("adj") { "JJ" } else { "NN" }.to_string())
                .collect()
        })
        .collect()
}

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid literal date")
}

fn base_doc(id: &str, doc_type: DocType, sentences: Vec<Vec<String>>) -> Document {
    let n = sentences.len();
    Document {
        id: id.to_string(),
        doc_type,
        author_id: None,
        issue_id: None,
        event_index: None,
        date: None,
        sentences,
        referenced_entities: vec![Vec::new(); n],
        headline: None,
        pos_tags: Vec::new(),
    }
}

/// One author, one issue, one event and one document of every type.
///
/// Documents: `wiki_trump`, `tweet_1` (mentions `cuomo` and `nra`),
/// `pr_1`, `persp_1`, `news_1` (mentions `nra`) and `bg_guns`.
pub fn worked_example_corpus() -> Corpus {
    let mut wiki = base_doc(
        "wiki_trump",
        DocType::Wikipedia,
        vec![toks(&["trump", "is", "a", "politician"])],
    );
    wiki.author_id = Some("trump".into());

    let mut tweet = base_doc(
        "tweet_1",
        DocType::Tweet,
        vec![toks(&["the", "nra", "is", "under", "siege", "by", "cuomo"])],
    );
    tweet.author_id = Some("trump".into());
    tweet.issue_id = Some("guns".into());
    tweet.event_index = Some(0);
    tweet.date = Some(date(2019, 3, 2));
    tweet.referenced_entities = vec![toks(&["nra", "cuomo"])];

    let mut pr = base_doc(
        "pr_1",
        DocType::PressRelease,
        vec![toks(&["statement", "on", "gun", "rights"])],
    );
    pr.author_id = Some("trump".into());
    pr.issue_id = Some("guns".into());
    pr.event_index = Some(0);
    pr.date = Some(date(2019, 3, 3));

    let mut persp = base_doc(
        "persp_1",
        DocType::Perspective,
        vec![toks(&["we", "protect", "the", "second", "amendment"])],
    );
    persp.author_id = Some("trump".into());
    persp.issue_id = Some("guns".into());

    let mut news = base_doc(
        "news_1",
        DocType::News,
        vec![toks(&["nra", "faces", "new", "york", "probe"])],
    );
    news.issue_id = Some("guns".into());
    news.event_index = Some(0);
    news.date = Some(date(2019, 3, 1));
    news.referenced_entities = vec![toks(&["nra"])];
    news.headline = Some("nra faces new york probe".into());

    let bg = base_doc(
        "bg_guns",
        DocType::Background,
        vec![toks(&["gun", "policy", "background"])],
    );

    Corpus::from_parts(
        vec![
            entity("trump", EntityKind::Author),
            entity("cuomo", EntityKind::Referenced),
            entity("nra", EntityKind::Referenced),
        ],
        vec![issue("guns", "bg_guns")],
        vec![EventRecord {
            issue_id: "guns".into(),
            index: 0,
            start_date: date(2019, 3, 1),
            end_date: date(2019, 3, 5),
            news_doc_ids: Vec::new(),
        }],
        vec![wiki, tweet, pr, persp, news, bg],
        EventSource::Supplied,
    )
    .expect("fixture is valid")
}

fn entity(id: &str, kind: EntityKind) -> EntityRecord {
    EntityRecord {
        id: id.into(),
        name: id.into(),
        kind,
    }
}

fn issue(id: &str, background: &str) -> IssueRecord {
    IssueRecord {
        id: id.into(),
        name: id.into(),
        background_doc: background.into(),
        gold_hashtags: Default::default(),
    }
}

/// Six documents: author `ann`'s encyclopedia article and tweet on event
/// `guns#0`, the news article of that event, the two issue backgrounds and
/// a news article of `taxes#0`.
pub fn six_document_corpus() -> Corpus {
    let mut wiki = base_doc("wiki_ann", DocType::Wikipedia, vec![toks(&["ann", "bio"])]);
    wiki.author_id = Some("ann".into());
    let mut tweet = base_doc("tw_ann", DocType::Tweet, vec![toks(&["guns", "now"])]);
    tweet.author_id = Some("ann".into());
    tweet.issue_id = Some("guns".into());
    tweet.event_index = Some(0);
    let mut n1 = base_doc("news_guns", DocType::News, vec![toks(&["shooting"])]);
    n1.issue_id = Some("guns".into());
    n1.date = Some(date(2020, 1, 2));
    let mut n2 = base_doc("news_tax", DocType::News, vec![toks(&["tax", "bill"])]);
    n2.issue_id = Some("taxes".into());
    n2.date = Some(date(2020, 2, 2));
    let bg1 = base_doc("bg_guns", DocType::Background, vec![toks(&["guns"])]);
    let bg2 = base_doc("bg_taxes", DocType::Background, vec![toks(&["taxes"])]);
    let ev = |issue: &str, m: u32| EventRecord {
        issue_id: issue.into(),
        index: 0,
        start_date: date(2020, m, 1),
        end_date: date(2020, m, 5),
        news_doc_ids: Vec::new(),
    };
    Corpus::from_parts(
        vec![entity("ann", EntityKind::Author)],
        vec![issue("guns", "bg_guns"), issue("taxes", "bg_taxes")],
        vec![ev("guns", 1), ev("taxes", 2)],
        vec![wiki, tweet, n1, n2, bg1, bg2],
        EventSource::Supplied,
    )
    .expect("fixture is valid")
}

/// Shape of a generated corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub authors: usize,
    pub issues: usize,
    pub events_per_issue: usize,
    pub tweets_per_event: usize,
    pub press_per_event: usize,
    pub perspectives_per_issue: usize,
    pub news_per_event: usize,
    pub referenced_entities: usize,
    /// Distinct sentences each (author, issue) pair writes from.
    pub pool_size: usize,
    pub sentences_per_doc: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            authors: 4,
            issues: 2,
            events_per_issue: 2,
            tweets_per_event: 2,
            press_per_event: 1,
            perspectives_per_issue: 1,
            news_per_event: 2,
            referenced_entities: 4,
            pool_size: 3,
            sentences_per_doc: 2,
            seed: 7,
        }
    }
}

pub fn author_id(a: usize) -> String {
    format!("pol{a:02}")
}

pub fn issue_id(i: usize) -> String {
    format!("iss{i}")
}

pub fn entity_id(e: usize) -> String {
    format!("ent{e:02}")
}

/// Generates a corpus from `cfg`.
///
/// Authors `pol00..`, issues `iss0..`, referenced entities `ent00..`.
/// Each first-person document and news article closes with a one-sentence
/// mention of a randomly chosen referenced entity, mentioned twice so it is
/// the document's most frequent entity. Event `k` of issue `i` spans five
/// days; all documents of an event are dated inside it.
pub fn synthetic_corpus(cfg: &SyntheticConfig) -> Result<Corpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut entities: Vec<EntityRecord> = (0..cfg.authors)
        .map(|a| entity(&author_id(a), EntityKind::Author))
        .collect();
    entities.extend((0..cfg.referenced_entities).map(|e| entity(&entity_id(e), EntityKind::Referenced)));

    let pool = |a: usize, i: usize, s: usize| -> Vec<String> {
        vec![
            format!("w{a}x{i}y{s}"),
            format!("adj{}", (a * 7 + i * 3 + s) % 11),
            format!("about{i}"),
            format!("by{a}"),
        ]
    };
    let issue_pool = |i: usize, s: usize| -> Vec<String> {
        vec![format!("news{i}n{s}"), format!("adj{}", (i + s) % 11), format!("topic{i}")]
    };

    let mut documents = Vec::new();
    let mut issues = Vec::new();
    let mut events = Vec::new();

    let body = |rng: &mut ChaCha8Rng, sentences: &[Vec<String>], n: usize| -> Vec<Vec<String>> {
        (0..n)
            .map(|_| sentences.choose(rng).expect("non-empty pool").clone())
            .collect()
    };
    let with_mention = |rng: &mut ChaCha8Rng, doc: &mut Document| {
        if cfg.referenced_entities == 0 {
            return;
        }
        let e = entity_id(rng.gen_range(0..cfg.referenced_entities));
        doc.sentences.push(vec![e.clone(), "and".into(), e.clone()]);
        doc.referenced_entities.push(vec![e.clone(), e]);
    };

    for a in 0..cfg.authors {
        let mut wiki = base_doc(
            &format!("wk_{a}"),
            DocType::Wikipedia,
            vec![vec![format!("bio{a}"), "politician".into()]],
        );
        wiki.author_id = Some(author_id(a));
        wiki.pos_tags = pos_for(&wiki.sentences);
        documents.push(wiki);
    }

    for i in 0..cfg.issues {
        let bg = base_doc(
            &format!("bg_{i}"),
            DocType::Background,
            vec![vec![format!("background{i}"), "policy".into()]],
        );
        documents.push(bg);
        issues.push(issue(&issue_id(i), &format!("bg_{i}")));
        let news_pool: Vec<Vec<String>> = (0..cfg.pool_size).map(|s| issue_pool(i, s)).collect();

        for k in 0..cfg.events_per_issue {
            let start = date(2020, 1, 1) + Duration::days((i * 200 + k * 20) as i64);
            events.push(EventRecord {
                issue_id: issue_id(i),
                index: k as u32,
                start_date: start,
                end_date: start + Duration::days(4),
                news_doc_ids: Vec::new(),
            });
            for j in 0..cfg.news_per_event {
                let mut n = base_doc(
                    &format!("nw_{i}_{k}_{j}"),
                    DocType::News,
                    body(&mut rng, &news_pool, cfg.sentences_per_doc),
                );
                with_mention(&mut rng, &mut n);
                n.issue_id = Some(issue_id(i));
                n.event_index = Some(k as u32);
                n.date = Some(start + Duration::days((j % 5) as i64));
                n.headline = Some(n.sentences[0].join(" "));
                n.pos_tags = pos_for(&n.sentences);
                documents.push(n);
            }
            for a in 0..cfg.authors {
                let own: Vec<Vec<String>> = (0..cfg.pool_size).map(|s| pool(a, i, s)).collect();
                for (prefix, t, count) in [
                    ("tw", DocType::Tweet, cfg.tweets_per_event),
                    ("pr", DocType::PressRelease, cfg.press_per_event),
                ] {
                    for j in 0..count {
                        let mut d = base_doc(
                            &format!("{prefix}_{a}_{i}_{k}_{j}"),
                            t,
                            body(&mut rng, &own, cfg.sentences_per_doc),
                        );
                        with_mention(&mut rng, &mut d);
                        d.author_id = Some(author_id(a));
                        d.issue_id = Some(issue_id(i));
                        d.event_index = Some(k as u32);
                        d.date = Some(start + Duration::days(((j + 1) % 5) as i64));
                        d.pos_tags = pos_for(&d.sentences);
                        documents.push(d);
                    }
                }
            }
        }
        for a in 0..cfg.authors {
            let own: Vec<Vec<String>> = (0..cfg.pool_size).map(|s| pool(a, i, s)).collect();
            for j in 0..cfg.perspectives_per_issue {
                let mut d = base_doc(
                    &format!("pe_{a}_{i}_{j}"),
                    DocType::Perspective,
                    body(&mut rng, &own, cfg.sentences_per_doc),
                );
                with_mention(&mut rng, &mut d);
                d.author_id = Some(author_id(a));
                d.issue_id = Some(issue_id(i));
                d.pos_tags = pos_for(&d.sentences);
                documents.push(d);
            }
        }
    }

    Corpus::from_parts(entities, issues, events, documents, EventSource::Supplied)
}

/// A graph with one author, its encyclopedia article and perspectives, one
/// issue, a target event with `linked` tweets and an unrelated event with
/// `eligible` news, tweet and press-release nodes.
///
/// Returns the graph and the target event's node index.
pub fn trimming_graph(eligible: usize, linked: usize, perspectives: usize) -> (DiscourseGraph, usize) {
    let mut nodes = vec![
        Node {
            kind: NodeKind::Author("a".into()),
            docs: vec!["wiki".into()],
        },
        Node {
            kind: NodeKind::Issue("i".into()),
            docs: vec!["bg".into()],
        },
        Node {
            kind: NodeKind::Event {
                issue: "i".into(),
                index: 0,
            },
            docs: vec!["n_target".into()],
        },
        Node {
            kind: NodeKind::Event {
                issue: "i".into(),
                index: 1,
            },
            docs: vec!["n_other".into()],
        },
    ];
    let (author, issue_node, target, other) = (0, 1, 2, 3);
    let mut edges = vec![(issue_node, target), (target, issue_node), (issue_node, other), (other, issue_node)];
    let push_doc = |nodes: &mut Vec<Node>, id: String, t: DocType| {
        nodes.push(Node {
            kind: NodeKind::Document {
                id: id.clone(),
                doc_type: t,
            },
            docs: vec![id],
        });
        nodes.len() - 1
    };
    let w = push_doc(&mut nodes, "wiki".into(), DocType::Wikipedia);
    edges.extend([(author, w), (w, author)]);
    for p in 0..perspectives {
        let d = push_doc(&mut nodes, format!("persp{p:04}"), DocType::Perspective);
        edges.extend([(author, d), (d, author), (issue_node, d)]);
    }
    for l in 0..linked {
        let d = push_doc(&mut nodes, format!("linked{l:04}"), DocType::Tweet);
        edges.extend([(author, d), (d, author), (target, d)]);
    }
    let types = [DocType::News, DocType::Tweet, DocType::PressRelease];
    for e in 0..eligible {
        let t = types[e % 3];
        let d = push_doc(&mut nodes, format!("elig{e:04}"), t);
        if t == DocType::News {
            edges.extend([(other, d), (d, other)]);
        } else {
            edges.extend([(author, d), (d, author), (other, d)]);
        }
    }
    let g = DiscourseGraph::new(nodes, edges).expect("generated graph is valid");
    (g, target)
}
