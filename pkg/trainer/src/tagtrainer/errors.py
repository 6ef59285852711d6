"""Trainer exception hierarchy, mirroring the one-line-JSON CLI convention."""


class TagtrainerError(Exception):
    code = "trainer"


class TrainFileError(TagtrainerError):
    code = "train-file"


class DocumentsError(TagtrainerError):
    code = "documents"


class ArtifactError(TagtrainerError):
    code = "artifact"


class AlignmentError(TagtrainerError):
    code = "alignment"


class TrainerConfigError(TagtrainerError):
    code = "trainer-config"
