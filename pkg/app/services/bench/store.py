import json
import logging
import uuid
from typing import List

from sqlalchemy.orm import Session

from app.models.run_record import RunRecord
from app.schemas.run_record_schema import RunRecordSchema
from app.utils.exceptions import LinBanditError

# Set up logging
logger = logging.getLogger(__name__)


class RecordStore:
    """Persists RunRecords in the results database"""

    @staticmethod
    def save_records(db: Session, campaign_id: str, experiment: str,
                     records: List[RunRecord]) -> int:
        """Save a batch of records in one transaction"""
        try:
            for record in records:
                db.add(RunRecordSchema(
                    id=str(uuid.uuid4()),
                    campaign_id=campaign_id,
                    experiment=experiment,
                    point=record.point,
                    algorithm=record.algorithm.value,
                    repetition=record.repetition,
                    seed=str(record.seed),
                    tau=record.tau,
                    returned_arm=record.returned_arm,
                    correct=record.correct,
                    status=record.status.value,
                    counts=json.dumps(record.counts),
                    epsilon=record.epsilon,
                    delta=record.delta,
                    lam=record.lam
                ))
            db.commit()
            logger.info(f"Stored {len(records)} records for campaign "
                        f"{campaign_id}")
            return len(records)
        except Exception as e:
            db.rollback()
            logger.error(f"Error storing records for campaign "
                         f"{campaign_id}: {str(e)}")
            raise LinBanditError(f"Failed to store run records: {str(e)}")

    @staticmethod
    def load_records(db: Session, campaign_id: str) -> List[RunRecord]:
        """Records of a campaign in point, algorithm, repetition order"""
        rows = db.query(RunRecordSchema).filter(
            RunRecordSchema.campaign_id == campaign_id
        ).order_by(
            RunRecordSchema.point,
            RunRecordSchema.algorithm,
            RunRecordSchema.repetition
        ).all()

        return [
            RunRecord(
                algorithm=row.algorithm,
                tau=row.tau,
                returned_arm=row.returned_arm,
                counts=json.loads(row.counts),
                correct=row.correct,
                status=row.status,
                epsilon=row.epsilon,
                delta=row.delta,
                lam=row.lam,
                seed=int(row.seed),
                point=row.point,
                repetition=row.repetition
            )
            for row in rows
        ]
