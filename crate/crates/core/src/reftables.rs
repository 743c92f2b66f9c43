//! Embedded exact reference tables: the T-polynomials `T_0..T_38` (in β)
//! and the γ-polynomials `γ_0..γ_14` (in α, even, as functions of α²).
//!
//! The tables are data, not computed: entries are transcribed in their
//! published factored form and parsed into exact polynomials at load.
//! Transcription judgments are recorded next to the entry they concern in
//! [`TABLE_NOTES`]. Structural verification (divisibility, degrees,
//! parity, sign of the leading coefficient) guards the transcription.

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rat::Rat;
use crate::unipoly::{parse_expr, UniPoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RefTableError {
    #[error("no entry {1} in family {0}")]
    UnknownIndex(String, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    T,
    Gamma,
}

impl Family {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t" => Some(Family::T),
            "gamma" | "g" => Some(Family::Gamma),
            _ => None,
        }
    }
}

/// `(index, factored source)`; T entries are indexed by the even subscript
/// `2k`, γ entries by `k`.
const T_TABLE: &[(usize, &str)] = &[
    (0, "1"),
    (2, "(1/12)*b"),
    (4, "(1/240)*b*(-2+5*b)"),
    (6, "(1/4032)*b*(16+42*b+35*b^2)"),
    (8, "(1/34560)*b*(-4+5*b)*(36-56*b+35*b^2)"),
    (10, "(1/101376)*b*(768-2288*b+2684*b^2-1540*b^3+385*b^4)"),
    (12, "(1/50319360)*b*(-1061376+3327584*b-4252248*b^2+2862860*b^3-1051050*b^4+175175*b^5)"),
    (
        14,
        "(1/6635520)*b*(552960-1810176*b+2471456*b^2-1849848*b^3+820820*b^4-210210*b^5+25025*b^6)",
    ),
    (
        16,
        "(1/451215360)*b*(-200005632+679395072*b-978649472*b^2+792548432*b^3-397517120*b^4+125925800*b^5-23823800*b^6+2127125*b^7)",
    ),
    (
        18,
        "(1/42361159680)*b*(129369047040-453757851648*b+683526873856*b^2-589153364352*b^3+323159810064*b^4-117327450240*b^5+27973905960*b^6-4073869800*b^7+282907625*b^8)",
    ),
    (
        20,
        "(1/1471492915200)*b*(-38930128699392+140441050828800*b-219792161825280*b^2+199416835425280*b^3-117302530691808*b^4+47005085727600*b^5-12995644662000*b^6+2422012593000*b^7-280078548750*b^8+15559919375*b^9)",
    ),
    (
        22,
        "(1/1758147379200)*b*(494848416153600-1830317979303936*b+2961137042841600*b^2-2805729689044480*b^3+1747214980192000*b^4-755817391389984*b^5+232489541684400*b^6-5074916606600*b^7+7607466867000*b^8-715756291250*b^9+32534376875*b^10)",
    ),
    (
        24,
        "(1/417368899584000)*b*(-1505662706987827200+5695207005856038912*b-9487372599204065280*b^2+9332354263294766080*b^3-6096633539052376320*b^4+2806128331871953088*b^5-937291839756592320*b^6+229239926321406000*b^7-40598842049766000*b^8+5005999501002500*b^9-390802935022500*b^10+14803141478125*b^11)",
    ),
    (
        26,
        "(1/15410543984640)*b*(844922884529848320-3261358271400247296*b+5576528334428209152*b^2-5668465199488266240*b^3+3858582205451484160*b^4-1870620248833400064*b^5+667822651436228288*b^6-178292330746770240*b^7+35600276746834800*b^8-5225593531158000*b^9+539680243602500*b^10-35527539547500*b^11+1138703190625*b^12)",
    ),
    (
        28,
        "(1/141874849382400)*b*(-138319015041155727360+543855095595477762048*b-952027796641042464768*b^2+996352286992030556160*b^3-703040965960031795200*b^4+356312537387839432192*b^5-134466795172062184832*b^6+38526945410311117760*b^7-8436987713444690400*b^8+1404048942958662000*b^9-173777038440005000*b^10+15258232341852500*b^11-858582205731250*b^12+23587423234375*b^13)",
    ),
    (
        30,
        "(1/28026642660065280)*b*(562009739464769840087040-2247511941596311764074496*b+4019108379306905439830016*b^2-4317745925208072594259968*b^3+3145163776677939429416960*b^4-1656917203539032341530624*b^5+655643919364420586023424*b^6-199227919419039256217472*b^7+46995751664475880185920*b^8-8614026107092938211680*b^9+1214778349162323946000*b^10-128587452922193265000*b^11+9720180867524627500*b^12-472946705787806250*b^13+11260635852090625*b^14)",
    ),
    (
        32,
        "(1/922166952040857600)*b*(-435617713657079143134658560+1769501101795425588791476224*b-3226607738514112740810817536*b^2+3549464948895368918909386752*b^3-2660240772214473252783390720*b^4+1450197119150695223028064256*b^5-597982476958827532820312064*b^6+191042987397310700759115008*b^7-47937412602413871076700160*b^8+9496768069402188916140800*b^9-1480818668624216662540800*b^10+179407801092762942700000*b^11-16436708736371283360000*b^12+1081201211974333450000*b^13-45943394276529750000*b^14+957154047427703125*b^15)",
    ),
    (
        34,
        "(1/19725496300339200)*b*(249245942713958501292441600-1027227011317383671945625600*b+1907002180538686183638564864*b^2-2143650324846265987318677504*b^3+1648507262010394952489828352*b^4-926543387509564170390077440*b^5+396194506712421055863955456*b^6-132202422240130962057834496*b^7+34964305711242759446603008*b^8-7388542677376642277816320*b^9+1249066025676468611772160*b^10-167917708706445592294400*b^11+17680052341202751500000*b^12-1416281700897823760000*b^13+81822997425819650000*b^14-3062892951768650000*b^15+56303179260453125*b^16)",
    ),
    (
        36,
        "(1/2163255728265599385600)*b*(-823939351844726605927049141944320+3441870155335118292992998571507712*b-6496555740332629910708455118733312*b^2+7449087490112312991527181748273152*b^3-5864346479278651486249632960479232*b^4+3388164372699248551771666420400128*b^5-1496540121213913485448632812126208*b^6+518865633562168075157007576711168*b^7-143629918822573878550516045152768*b^8+32064170141779614103830545460480*b^9-5796758938020445202118146035200*b^10+847300686907144962577480595200*b^11-99312783205522355459126136000*b^12+9177047640834925292701260000*b^13-648457545044826396980100000*b^14+33170257743163225434750000*b^15-1102176285769664136281250*b^16+18009416434144838828125*b^17)",
    ),
    (
        38,
        "(1/36926129074234982400)*b*(474532164251036578163360740147200-2007451486703515474962315120476160*b+3847934197291457612390714031734784*b^2-4493689786808060863818452674019328*b^3+3614524930468188702037700647059456*b^4-2141316875360841710557998512996352*b^5+973848254246503892750214050676736*b^6-349368584100039649120827420721152*b^7+100669622071229591817492908396544*b^8-23568253290977786453992670028288*b^9+4510878698049367240357658177280*b^10-706768823732042351913226513920*b^11+90309415620240337258651513600*b^12-9317686151162890530973944000*b^13+762077701556459749521060000*b^14-47865941553425413918500000*b^15+2183358737524668003300000*b^16-64833899162921419781250*b^17+947864022849728359375*b^18)",
    ),
];

const GAMMA_TABLE: &[(usize, &str)] = &[
    (0, "1"),
    (1, "(a-1)*(a+1)"),
    (2, "(a-1)*(a+1)*(a^2+23)"),
    (3, "(1/5)*(a-1)*(a+1)*(5*a^4-298*a^2+11237)"),
    (4, "(1/5)*(a-1)*(a+1)*(5*a^6-1887*a^4-241041*a^2+2482411)"),
    (5, "(1/7)*(a-1)*(a+1)*(7*a^8-7420*a^6+1451274*a^4-220083004*a^2+1363929895)"),
    (
        6,
        "(1/35)*(a-1)*(a+1)*(35*a^10-78295*a^8+76299326*a^6+25171388146*a^4-915974552561*a^2+4175309343349)",
    ),
    (
        7,
        "(1/5)*(a-1)*(a+1)*(5*a^12-20190*a^10+45700491*a^8-19956117988*a^6+7134232164555*a^4-142838662997982*a^2+525035501918789)",
    ),
    (
        8,
        "(1/5)*(a-1)*(a+1)*(5*a^14-32963*a^12+135959721*a^10-286961736847*a^8-181220025335249*a^6+14569888571515191*a^4-201164685264533917*a^2+628141988536245979)",
    ),
    (
        9,
        "(1/275)*(a-1)*(a+1)*(275*a^16-2758360*a^14+18264509780*a^12-84980828208232*a^10+66925280510995058*a^8-44067073909426812136*a^6+1854998841811009566164*a^4-19662907822146661450072*a^2+53917386529177385523923)",
    ),
    (
        10,
        "(1/385)*(a-1)*(a+1)*(385*a^18-5575185*a^16+54739917540*a^14-441040104588468*a^12+1704035085901524414*a^10+1756960395376174557138*a^8-250051464026304718963308*a^6+6980518270250459747738748*a^4-60455711535001643407631031*a^2+148934765720971351352763767)",
    ),
    (
        11,
        "(1/455)*(a-1)*(a+1)*(455*a^20-9133670*a^18+125862813531*a^16-1551851251661256*a^14+13138809751628741310*a^12-16369514872967259031716*a^10+17232759645860853077282430*a^8-1244436833719440506308299720*a^6+25839020308128868113601951611*a^4-190358675897996551624967496038*a^2+428338546734334777277256756263)",
    ),
    (
        12,
        "(1/2275)*(a-1)*(a+1)*(2275*a^22-61286225*a^20+1138143234085*a^18-19899973184243295*a^16+289010332500834015006*a^14-1800790721758319530222794*a^12-2750182482964852045472807958*a^10+609308050185234247965268669122*a^8-28432172394701052919004186087217*a^6+469816115524203185110937294104043*a^4-3027851448645708864699151581524191*a^2+6301150244751080741665843707891149)",
    ),
    (
        13,
        "(1/175)*(a-1)*(a+1)*(175*a^24-6160980*a^22+149439244350*a^20-3517885582792900*a^18+77320157515532388801*a^16-1061289073759987813960872*a^14+1919804727678589315033522404*a^12-2952731541639113644408376751144*a^10+324872646459937078198178265809697*a^8-11031411694939020431719354111233796*a^6+151642180639270311056923944406592190*a^4-872621327007244741940501331510316308*a^2+1695881990125518108674571524660426383)",
    ),
    (
        14,
        "(1/25)*(a-1)*(a+1)*(25*a^26-1125085*a^24+34764296190*a^22-1061022101650654*a^20+32669714654074122547*a^18-771636658087676104012503*a^16+7084687100305977812202981972*a^14+15014942311637580765119538315852*a^12-4768962770078816392189126626103953*a^10+332894266374078575368155254033280197*a^8-8828958071754076606079100061553173298*a^6+104157175058098445988624066193639753842*a^4-543550947078313469794032584810082731483*a^2+994159279221093204357661985843042030351)",
    ),
];

/// Transcription judgments made while embedding the source tables.
pub const TABLE_NOTES: &[(&str, usize, &str)] = &[
    (
        "gamma",
        9,
        "the alpha^10 coefficient is printed as '84980828208232,alpha^10'; the comma is read as multiplication",
    ),
    (
        "T",
        22,
        "the beta^7 coefficient 5074916606600 breaks the magnitude decay of its neighbours and may have dropped digits in print; transcribed as printed",
    ),
];

fn table(family: Family) -> &'static [(usize, &'static str)] {
    match family {
        Family::T => T_TABLE,
        Family::Gamma => GAMMA_TABLE,
    }
}

fn family_var(family: Family) -> &'static str {
    match family {
        Family::T => "b",
        Family::Gamma => "a",
    }
}

/// Exact polynomial for one table entry.
pub fn ref_poly(family: Family, index: usize) -> Result<UniPoly, RefTableError> {
    let src = table(family)
        .iter()
        .find(|(i, _)| *i == index)
        .map(|(_, s)| *s)
        .ok_or_else(|| RefTableError::UnknownIndex(format!("{family:?}"), index))?;
    Ok(parse_expr(src, family_var(family)).expect("embedded table entry parses"))
}

pub fn indices(family: Family) -> Vec<usize> {
    table(family).iter().map(|(i, _)| *i).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct StructuralReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies the structure read off the tables: every `γ_k` (k ≥ 1) is even
/// in α, vanishes at ±1 and has degree 2k with positive leading
/// coefficient; every `T_{2k}` (k ≥ 1) is divisible by β with degree k and
/// positive leading coefficient.
pub fn structural_check() -> StructuralReport {
    let mut violations = Vec::new();
    let mut checked = 0;
    for &(idx, _) in T_TABLE {
        checked += 1;
        let p = ref_poly(Family::T, idx).unwrap();
        let k = idx / 2;
        if idx == 0 {
            if p != UniPoly::one("b") {
                violations.push("T_0 should be 1".into());
            }
            continue;
        }
        if !p.coeff(0).is_zero() {
            violations.push(format!("T_{idx} is not divisible by beta"));
        }
        if p.degree() != Some(k) {
            violations.push(format!("T_{idx} has degree {:?}, expected {k}", p.degree()));
        }
        if !p.leading_coeff().is_positive() {
            violations.push(format!("T_{idx} has a nonpositive leading coefficient"));
        }
    }
    for &(idx, _) in GAMMA_TABLE {
        checked += 1;
        let p = ref_poly(Family::Gamma, idx).unwrap();
        if idx == 0 {
            // γ_0 = 1 is exempt from the divisibility rule.
            if p != UniPoly::one("a") {
                violations.push("gamma_0 should be 1".into());
            }
            continue;
        }
        let one = Rat::from_integer(1.into());
        if !p.eval(&one).is_zero() || !p.eval(&(-one)).is_zero() {
            violations.push(format!("gamma_{idx} is not divisible by (a-1)(a+1)"));
        }
        if p.coeffs.iter().enumerate().any(|(i, c)| i % 2 == 1 && !c.is_zero()) {
            violations.push(format!("gamma_{idx} is not even in alpha"));
        }
        if p.degree() != Some(2 * idx) {
            violations.push(format!(
                "gamma_{idx} has degree {:?}, expected {}",
                p.degree(),
                2 * idx
            ));
        }
        if !p.leading_coeff().is_positive() {
            violations.push(format!("gamma_{idx} has a nonpositive leading coefficient"));
        }
    }
    StructuralReport { checked, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn spot_entries() {
        assert_eq!(ref_poly(Family::T, 2).unwrap(), UniPoly::monomial("b", rat(1, 12), 1));
        assert_eq!(ref_poly(Family::T, 0).unwrap(), UniPoly::one("b"));
        // (a-1)(a+1)(a^2+23) = a^4 + 22 a^2 - 23
        assert_eq!(
            ref_poly(Family::Gamma, 2).unwrap(),
            UniPoly::new("a", vec![rat_int(-23), rat_int(0), rat_int(22), rat_int(0), rat_int(1)])
        );
        assert!(matches!(
            ref_poly(Family::T, 3),
            Err(RefTableError::UnknownIndex(_, 3))
        ));
    }

    #[test]
    fn table_sizes() {
        assert_eq!(T_TABLE.len(), 20);
        assert_eq!(GAMMA_TABLE.len(), 15);
    }

    #[test]
    fn structural_checks_all_pass() {
        let report = structural_check();
        assert_eq!(report.checked, 35);
        assert!(report.passed(), "violations: {:?}", report.violations);
    }

    #[test]
    fn round_trip_serialisation_is_byte_identical() {
        for family in [Family::T, Family::Gamma] {
            for idx in indices(family) {
                let p = ref_poly(family, idx).unwrap();
                let json = serde_json::to_string(&p.to_json_map()).unwrap();
                let q = UniPoly::from_json_map(
                    &serde_json::from_str(&json).unwrap(),
                    family_var(family),
                )
                .unwrap();
                let json2 = serde_json::to_string(&q.to_json_map()).unwrap();
                assert_eq!(json, json2);
                assert_eq!(p, q);
            }
        }
    }

    #[test]
    fn evaluation_spot_value() {
        // T_4(1/2) = (1/240)(1/2)(-2 + 5/2) = 1/960
        let t4 = ref_poly(Family::T, 4).unwrap();
        assert_eq!(t4.eval(&rat(1, 2)), rat(1, 960));
    }
}
