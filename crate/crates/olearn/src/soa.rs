//! The standard optimal algorithm: predict the label whose restriction has
//! the larger Littlestone dimension, then restrict the version space by the
//! revealed example.

use crate::bits::Bits;
use crate::concepts::{ConceptClass, Instance, LabeledExample};
use crate::dims::LdimCache;
use crate::{Error, Result};

/// Mutable state of one SOA run: the surviving version space and the
/// mistakes made so far.
pub struct SoaState<'a> {
    cache: LdimCache<'a>,
    mask: Bits,
    pub mistake_count: u64,
}

impl<'a> SoaState<'a> {
    pub fn new(class: &'a ConceptClass) -> Result<Self> {
        if class.is_empty() {
            return Err(Error::EmptyClass);
        }
        Ok(SoaState {
            mask: class.full_mask(),
            cache: LdimCache::new(class),
            mistake_count: 0,
        })
    }

    pub fn version_space(&self) -> ConceptClass {
        self.cache.class().subclass(&self.mask)
    }

    pub fn predict(&self, x: Instance) -> bool {
        self.cache.soa_mask(&self.mask, x)
    }

    /// Feed one example; returns whether the prediction was a mistake.
    pub fn observe(&mut self, e: LabeledExample) -> Result<bool> {
        if e.x.0 >= self.cache.class().domain_size() {
            return Err(Error::InstanceOutOfRange {
                x: e.x.0,
                domain: self.cache.class().domain_size(),
            });
        }
        let next = self.cache.class().restrict_mask(&self.mask, e);
        if next.is_empty() {
            return Err(Error::UnrealizableStream { prefix_len: 0 });
        }
        let mistake = self.predict(e.x) != e.y;
        if mistake {
            self.mistake_count += 1;
        }
        self.mask = next;
        Ok(mistake)
    }
}

/// One-shot prediction of `SOA_C(x)`; ties broken toward 1.
pub fn soa_predict(class: &ConceptClass, x: Instance) -> Result<bool> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    if x.0 >= class.domain_size() {
        return Err(Error::InstanceOutOfRange {
            x: x.0,
            domain: class.domain_size(),
        });
    }
    Ok(LdimCache::new(class).soa_mask(&class.full_mask(), x))
}

#[derive(Clone, Debug)]
pub struct SoaRun {
    pub predictions: Vec<bool>,
    pub mistake_count: u64,
    pub final_version_space: ConceptClass,
}

/// Run SOA over a full stream. The stream must be realizable by `class`; a
/// violation is reported with the length of the first bad prefix.
pub fn soa_run(class: &ConceptClass, stream: &[LabeledExample]) -> Result<SoaRun> {
    let mut state = SoaState::new(class)?;
    let mut predictions = Vec::with_capacity(stream.len());
    for (t, &e) in stream.iter().enumerate() {
        if e.x.0 >= class.domain_size() {
            return Err(Error::InstanceOutOfRange {
                x: e.x.0,
                domain: class.domain_size(),
            });
        }
        predictions.push(state.predict(e.x));
        state
            .observe(e)
            .map_err(|_| Error::UnrealizableStream { prefix_len: t + 1 })?;
    }
    Ok(SoaRun {
        predictions,
        mistake_count: state.mistake_count,
        final_version_space: state.version_space(),
    })
}
