use super::MinkowskiVec;

/// Sign class of the extrinsic family constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    Positive,
    Negative,
    Zero,
}

impl CaseTag {
    pub fn of(c: f64) -> Self {
        if c > 0.0 {
            CaseTag::Positive
        } else if c < 0.0 {
            CaseTag::Negative
        } else {
            CaseTag::Zero
        }
    }

    pub fn sign(&self) -> i8 {
        match self {
            CaseTag::Positive => 1,
            CaseTag::Negative => -1,
            CaseTag::Zero => 0,
        }
    }
}

/// The pair (c1, c2) spanning the affine planes that carry the v-curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseFrame {
    pub c1: MinkowskiVec,
    pub c2: MinkowskiVec,
    pub tag: CaseTag,
}

impl CaseFrame {
    /// The concrete choices used for the explicit immersions:
    /// (e1, e2), (e2, e1 + √2 e4), (e1 + e4, e2).
    pub fn standard(tag: CaseTag) -> Self {
        let e = MinkowskiVec::e;
        let (c1, c2) = match tag {
            CaseTag::Positive => (e(1), e(2)),
            CaseTag::Negative => (e(2), e(1) + 2f64.sqrt() * e(4)),
            CaseTag::Zero => (e(1) + e(4), e(2)),
        };
        CaseFrame { c1, c2, tag }
    }

    /// Required Gram matrix [⟨c1,c1⟩, ⟨c1,c2⟩, ⟨c2,c2⟩] for the tag.
    pub fn expected_gram(tag: CaseTag) -> [f64; 3] {
        match tag {
            CaseTag::Positive => [1.0, 0.0, 1.0],
            CaseTag::Negative => [1.0, 0.0, -1.0],
            CaseTag::Zero => [0.0, 0.0, 1.0],
        }
    }

    pub fn gram(&self) -> [f64; 3] {
        [self.c1.inner(&self.c1), self.c1.inner(&self.c2), self.c2.inner(&self.c2)]
    }

    /// Largest deviation of the Gram matrix from the one its tag requires.
    pub fn gram_defect(&self) -> f64 {
        let g = self.gram();
        let e = Self::expected_gram(self.tag);
        (0..3).map(|i| (g[i] - e[i]).abs()).fold(0.0, f64::max)
    }
}
