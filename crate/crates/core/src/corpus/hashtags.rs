use std::collections::{BTreeMap, BTreeSet};

use super::{DocType, Document, IssueRecord};
use crate::error::{Error, Result};

/// Lowercases a hashtag and makes sure it carries a leading `#`.
pub fn normalize_hashtag(tag: &str) -> String {
    let tag = tag.trim().to_lowercase();
    if tag.starts_with('#') {
        tag
    } else {
        format!("#{tag}")
    }
}

/// Lowercased hashtags occurring as tokens in the document.
pub fn hashtags(doc: &Document) -> BTreeSet<String> {
    doc.sentences
        .iter()
        .flatten()
        .filter(|t| t.len() > 1 && t.starts_with('#'))
        .map(|t| t.to_lowercase())
        .collect()
}

/// Issues whose gold hashtag set intersects the tweet's hashtags, ordered by
/// issue id. A tweet matching several issues belongs to all of them.
pub fn classify_tweet_issue<'a>(
    tweet: &Document,
    issues: impl IntoIterator<Item = &'a IssueRecord>,
) -> Result<Vec<String>> {
    if tweet.doc_type != DocType::Tweet {
        return Err(Error::Validation(format!(
            "document {} is a {}, not a tweet",
            tweet.id, tweet.doc_type
        )));
    }
    let tags = hashtags(tweet);
    let mut out: Vec<String> = issues
        .into_iter()
        .filter(|issue| {
            issue
                .gold_hashtags
                .iter()
                .any(|g| tags.contains(&normalize_hashtag(g)))
        })
        .map(|issue| issue.id.clone())
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Hand-built gold hashtag sets for the seven issues that have one
/// (economic policy has none), lowercased.
pub fn default_gold_hashtags() -> BTreeMap<&'static str, BTreeSet<String>> {
    let table: [(&str, &str); 7] = [
        (
            "guns",
            "#endgunviolence #guncontrol #gunviolence #nra #gunsafety #assaultweaponsban \
             #gunsense #marchforourlives #parkland #hr3435 #nationalwalkoutday #disarmhate \
             #guncontrolnow #backgroundchecks #nationalschoolwalkout #lasvegas #elpaso \
             #keepamericanssafe #gunrights #erpoact #lasvegasshooting #gunreform #hr1112 \
             #parklandstrong #elpasostrong #massshootings #parklandstudentsspeak #hr8",
        ),
        (
            "taxes",
            "#GOPTaxScam #TaxReform #TaxAndJobsAct #taxreform #goptaxscam #taxcutsandjobsact \
             #taxday #taxcuts #smallbusinessweek #economy #maga #billionairesfirst #gopbudget \
             #goptaxplan #goptaxbill #tax #taxscam #trumptax",
        ),
        (
            "immigration",
            "#FamiliesBelongTogether #Immigration #MuslimBan #daca #familiesbelongtogether \
             #dreamers #immigration #protectdreamers #dreamactnow #muslimban #heretostay \
             #keepfamiliestogether #protectthedream #defenddaca #immigrants #familyseparation \
             #nomuslimbanever #immigrant #nobannowall #borderwall #refugeeswelcome \
             #endfamilydetention #protectfamilies #DACA #refugees",
        ),
        (
            "abortion",
            "#ProChoice #ProLife #Abortion #prolife #abortion #marchforlife #prochoice \
             #theyfeelpain #bornaliveact #paincapable #hr36 #roevwade #unplanned #defundpp \
             #life #standwithnurses #endinfanticide #righttolife #infanticide #ppsellsbabyparts",
        ),
        (
            "lgbtq_rights",
            "#LGBTQ #LGBT #Homophobia #lgbtq #lgbt #equalityact #pridemonth #hr5 \
             #nationalcomingoutday #lgbtqequalityday #loveislove #lgbthistorymonth #transgender \
             #letkidslearn #trans #comingoutday #marriageequality #protecttranstroops \
             #lgbtqhistorymonth #defundconversiontherapy #transban #otd #prideinprogress \
             #nycpride #protecttranskids #transrightsarehumanrights #transdayofremembrance \
             #loveisthelaw #rfra #bathroombill",
        ),
        (
            "middle_east",
            "#MiddleEast #Iran #Israel #iran #israel #syria #middleeast #iraq #russia \
             #northkorea #irandeal #jordan #hezbollah #gaza #isis #hamas #terror #jihad \
             #violence #barbarism #palestinians #jewish #antisemitism #saudiarabia #iranian \
             #lebanon #turkey #jerusalem #iranprotests #israeli #freeiran #sanctions \
             #supportisrael #egypt #terrorism",
        ),
        (
            "environment",
            "#ActOnClimate #ClimateChange #GreenNewDeal #climatechange #actonclimate \
             #greennewdeal #climateactionnow #parisagreement #climatecrisis #earthday \
             #climatefriday #climate #climatestrike #climateaction #cleanenergy \
             #climatechangeisreal #environment #oceanclimateaction #cleanair \
             #climatechangeimpactsme #cleanwater #globalwarming #renewableenergy \
             #worldenvironmentday #climateemergency #peopleoverpolluters #greenjobs \
             #climatejustice #solar #environmentaljustice #cleanpowerplan #todaysclimatefact",
        ),
    ];
    table
        .into_iter()
        .map(|(issue, tags)| (issue, tags.split_whitespace().map(normalize_hashtag).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn issue(id: &str) -> IssueRecord {
        IssueRecord {
            id: id.into(),
            name: id.into(),
            background_doc: format!("bg_{id}"),
            gold_hashtags: default_gold_hashtags()[id].clone(),
        }
    }

    fn tweet(text: &str) -> Document {
        Document {
            id: "t".into(),
            doc_type: DocType::Tweet,
            author_id: Some("a".into()),
            issue_id: None,
            event_index: None,
            date: None,
            sentences: vec![text.split_whitespace().map(str::to_string).collect()],
            referenced_entities: vec![vec![]],
            headline: None,
            pos_tags: vec![],
        }
    }

    #[test]
    fn guncontrol_maps_to_guns() {
        let issues = [issue("guns"), issue("taxes")];
        let got = classify_tweet_issue(&tweet("we need #guncontrol now"), &issues).unwrap();
        assert_eq!(got, vec!["guns"]);
    }

    #[test]
    fn no_hashtags_no_issue() {
        let issues = [issue("guns"), issue("taxes")];
        assert!(classify_tweet_issue(&tweet("nothing tagged here"), &issues)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn multi_issue_tweet_joins_every_match() {
        let issues = [issue("guns"), issue("taxes"), issue("abortion")];
        let got = classify_tweet_issue(&tweet("#NRA and #TaxReform"), &issues).unwrap();
        assert_eq!(got, vec!["guns", "taxes"]);
    }

    #[test]
    fn non_tweets_are_rejected() {
        let mut d = tweet("#nra");
        d.doc_type = DocType::News;
        assert!(classify_tweet_issue(&d, &[issue("guns")]).is_err());
    }

    #[test]
    fn table_is_lowercase() {
        for tags in default_gold_hashtags().values() {
            for t in tags {
                assert_eq!(t, &t.to_lowercase());
            }
        }
        assert!(default_gold_hashtags()["taxes"].contains("#taxreform"));
    }

    proptest! {
        #[test]
        fn case_insensitive(words in prop::collection::vec("#?[a-zA-Z]{1,8}", 0..6)) {
            let issues = [issue("guns"), issue("taxes"), issue("environment")];
            let mut words = words;
            words.push("#GunControl".into());
            let text = words.join(" ");
            let a = classify_tweet_issue(&tweet(&text), &issues).unwrap();
            let b = classify_tweet_issue(&tweet(&text.to_lowercase()), &issues).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
