from sqlalchemy import Boolean, Column, DateTime, Float, Integer, String, Text
from sqlalchemy.sql import func

from app.databases.results import Base


class RunRecordSchema(Base):
    """Run records table schema"""
    __tablename__ = "run_records"

    id = Column(String, primary_key=True)
    campaign_id = Column(String, nullable=False, index=True)
    experiment = Column(String, nullable=False)
    point = Column(Float, nullable=True)
    algorithm = Column(String, nullable=False, index=True)
    repetition = Column(Integer, nullable=True)
    seed = Column(String, nullable=False)
    tau = Column(Integer, nullable=False)
    returned_arm = Column(Integer, nullable=False)
    correct = Column(Boolean, nullable=False)
    status = Column(String, nullable=False)
    counts = Column(Text, nullable=False)
    epsilon = Column(Float, nullable=False)
    delta = Column(Float, nullable=False)
    lam = Column(Float, nullable=False)
    created_at = Column(DateTime(timezone=True), server_default=func.now())

    def __repr__(self):
        return (f"<RunRecord(algorithm={self.algorithm}, point={self.point}, "
                f"tau={self.tau})>")
