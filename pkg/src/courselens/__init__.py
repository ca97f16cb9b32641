"""courselens: verbal-cue and structure analytics for hierarchical course
transcripts, plus a small from-scratch hierarchical transformer that
predicts instructor/course ratings."""

__version__ = "0.1.0"
