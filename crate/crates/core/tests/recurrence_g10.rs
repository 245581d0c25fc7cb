//! The ten-to-one family needs a large recurrence; fit it from 400 exact
//! terms and check the extension against independent exact powers.

use riskcurve::exact::{prob_pos, prob_pos_sweep};
use riskcurve::gamble::g_family_table;
use riskcurve::rational::to_decimal_string;
use riskcurve::recurrence::{extend, guess_recurrence};

#[test]
fn g10_recurrence_extends_exactly() {
    let t = g_family_table(10).unwrap();
    let seed = prob_pos_sweep(&t, 400, true).unwrap();
    let rec = guess_recurrence(&seed, 19, 16, 20).unwrap();
    assert_eq!((rec.order(), rec.degree()), (19, 16));
    assert!(rec.verified_through() >= 400);
    // nothing smaller fits
    assert!(guess_recurrence(&seed, 18, 16, 20).is_err());

    let ext = extend(&rec, &seed, 1200).unwrap();
    for n in [401, 777, 1000, 1200] {
        assert_eq!(ext.get(n).unwrap(), &prob_pos(&t, n, true).unwrap(), "n = {n}");
    }
    assert_eq!(to_decimal_string(ext.get(1000).unwrap(), 10), "0.8417618586");
}
